"""Acceptance gate: every numbered criterion runs at full size through the
experiment registry and reports one pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.  The whole file takes several minutes.
"""

import time

import pytest

from tritiles.experiments import REGISTRY, registry_audit, run_experiment

# criterion number -> experiment that certifies it, at default (full) size
CRITERIA = {
    1: "oracle-product",
    2: "partition-unity",
    3: "coefficient-decay",
    4: "grid-fuzz",
    5: "size-oracle",
    6: "energy-greedy",
    7: "combinatorial-bound",
    8: "model-consistency",
    9: "pprime-equivalence",
    10: "inner-norms",
    11: "restricted-type",
    12: "remainder-uniformity",
}

_cache: dict = {}


def _run(name: str) -> dict:
    if name not in _cache:
        t0 = time.monotonic()
        report = run_experiment(name)
        report["_wall"] = time.monotonic() - t0
        _cache[name] = report
    return _cache[name]


def test_registry_is_complete():
    audit = registry_audit()
    assert audit["complete"], f"uncovered criteria: {audit['missing']}"
    for n, name in CRITERIA.items():
        assert n in REGISTRY[name].criteria


@pytest.mark.parametrize(
    "number,experiment",
    sorted(CRITERIA.items()),
    ids=[f"criterion-{n:02d}-{CRITERIA[n]}" for n in sorted(CRITERIA)],
)
def test_criterion(number, experiment):
    report = _run(experiment)
    status = "PASS" if report["passed"] else "FAIL"
    print(f"[{status}] criterion {number}: {experiment} "
          f"({report['_wall']:.1f}s)")
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    assert report["passed"], f"failed checks: {failed}"
