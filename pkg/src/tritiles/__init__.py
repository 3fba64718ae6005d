"""Exact dyadic tile combinatorics, wave packets, symbol decompositions,
and model-form experiments for trilinear multipliers with singular symbols."""

from .dyadic import DyadicInterval, RationalInterval, ShiftedDyadicCube
from .tiles import Tile, TriTile, Tree
from .wavepacket import SampledFunction, WavePacket
from .tilenorms import CoefficientField
from .modelform import ModelConfig, StepFunction
from .experiments import REGISTRY, registry_audit, run_experiment

__all__ = [
    "DyadicInterval",
    "RationalInterval",
    "ShiftedDyadicCube",
    "Tile",
    "TriTile",
    "Tree",
    "SampledFunction",
    "WavePacket",
    "CoefficientField",
    "ModelConfig",
    "StepFunction",
    "REGISTRY",
    "registry_audit",
    "run_experiment",
]

__version__ = "0.1.0"
