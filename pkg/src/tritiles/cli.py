"""Command line front end for the experiment registry.

Two subcommands:

    tritiles list [--json]
        Print the experiment catalog, one line per experiment, or a JSON
        document with descriptions, claims, criteria and default configs.

    tritiles run NAME [--config FILE] [--seed N] [--out DIR]
        Run one registered experiment and write its artifacts:
        report.json plus one CSV file per table the experiment produces.

Reports are deterministic: everything that depends on (config, seed) lives
under stable keys with sorted-key JSON encoding, while wall-clock data is
quarantined in a separate "timing" field.  Running the same experiment
twice with the same config yields byte-identical output outside "timing".

Exit status is 0 iff every check in the report passed.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import yaml

from .experiments import REGISTRY, run_experiment


def _jsonable(obj):
    """Recursively convert report values to deterministic JSON-safe types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return {"fraction": [obj.numerator, obj.denominator]}
    if isinstance(obj, complex):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return _jsonable(obj.item())
    if hasattr(obj, "tolist"):  # numpy arrays
        return _jsonable(obj.tolist())
    return str(obj)


def _write_report(report: dict, out_dir: Path, timing: dict) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for filename, table in report.get("tables", {}).items():
        path = out_dir / filename
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(table["header"])
            for row in table["rows"]:
                writer.writerow([_csv_cell(v) for v in row])
        written.append(path)
    doc = _jsonable(report)
    doc["timing"] = timing
    doc["artifacts"] = sorted(p.name for p in written)
    path = out_dir / "report.json"
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(path)
    return written


def _csv_cell(v):
    if hasattr(v, "item"):  # numpy scalars
        v = v.item()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return v


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        loaded = yaml.safe_load(fh)
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise SystemExit(f"config file {path} must hold a mapping at top level")
    return loaded


def _cmd_list(args) -> int:
    if args.json:
        doc = {
            name: {
                "description": exp.description,
                "claim": exp.claim,
                "criteria": list(exp.criteria),
                "defaults": _jsonable(exp.defaults),
            }
            for name, exp in sorted(REGISTRY.items())
        }
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return 0
    width = max(len(name) for name in REGISTRY)
    for name, exp in sorted(REGISTRY.items()):
        print(f"{name:<{width}}  {exp.description}")
    return 0


def _cmd_run(args) -> int:
    if args.experiment not in REGISTRY:
        known = ", ".join(sorted(REGISTRY))
        print(f"unknown experiment {args.experiment!r}; known: {known}",
              file=sys.stderr)
        return 2
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    out_dir = Path(args.out) if args.out else Path(
        os.environ.get("TRITILES_OUT", "runs")) / args.experiment

    start = time.monotonic()
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    report = run_experiment(args.experiment, config)
    timing = {"started_utc": stamp,
              "wall_seconds": round(time.monotonic() - start, 3)}

    written = _write_report(report, out_dir, timing)
    for check in report["checks"]:
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"[{mark}] {args.experiment}: {check['name']}")
    for path in written:
        print(f"wrote {path}")
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tritiles",
        description="Run numerical and combinatorial experiments on dyadic "
                    "tile collections, wave packets and localized symbols.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="show the experiment catalog")
    p_list.add_argument("--json", action="store_true",
                        help="emit the catalog as JSON")
    p_list.set_defaults(func=_cmd_list)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("experiment", help="registered experiment name")
    p_run.add_argument("--config", help="YAML file of config overrides")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the seed from the config")
    p_run.add_argument("--out", help="output directory (default runs/NAME, "
                       "root overridable via TRITILES_OUT)")
    p_run.set_defaults(func=_cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
