"""Acceptance criteria 1-10.

Each criterion prints one ``PASS`` or ``FAIL`` line.  The suites run at full
scale (about 15 minutes on one core); set ``MINORVERIFY_SCALE=quick`` for a
smoke run.  Run directly with ``python3 tests/test_acceptance.py`` for the
summary lines alone.
"""

from __future__ import annotations

import io
import os
import sys

import pytest

from minorverify.suites import SUITES, run_suite

SCALE = os.environ.get("MINORVERIFY_SCALE", "full")
BY_CRITERION = {s.criterion: name for name, s in SUITES.items()}

# wall-clock ceilings for the two suites that carry one
LIMITS = {1: 600.0, 6: 1800.0}


def _counts(rep) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(rep.counts.items()))


def evaluate(criterion: int) -> tuple[bool, str]:
    name = BY_CRITERION[criterion]
    rep = run_suite(name, scale=SCALE)
    ok = rep.failures == 0 and rep.counts["fail"] == 0
    detail = f"{name}: {_counts(rep)} in {rep.elapsed:.1f}s"
    if criterion in (1, 2, 3, 6, 7):
        # no findings are possible here, every item must pass outright
        ok = ok and rep.clean
    if criterion in LIMITS and SCALE == "full":
        ok = ok and rep.elapsed <= LIMITS[criterion]
    if criterion == 8:
        # the suite must have exercised both contraction and recombination
        ok = ok and rep.counts["pass"] > 0
    if criterion == 9:
        done = rep.tags["engine-colored"]
        total = done + rep.tags["engine-failed"]
        detail += f"; engine colored {done}/{total}"
    blocked = {t: c for t, c in rep.tags.items() if t.startswith(("induction-blocked", "unsatisfiable"))}
    if blocked:
        detail += "; findings " + ", ".join(f"{t}={c}" for t, c in sorted(blocked.items()))
    return ok, detail


def evaluate_determinism() -> tuple[bool, str]:
    differing = []
    for name in sorted(SUITES):
        runs = []
        for _ in range(2):
            buf = io.StringIO()
            run_suite(name, scale="quick", out=buf)
            runs.append(buf.getvalue().encode())
        if runs[0] != runs[1] or not runs[0]:
            differing.append(name)
    detail = f"{len(SUITES) - len(differing)}/{len(SUITES)} suites byte-identical"
    if differing:
        detail += " (differ: " + ", ".join(differing) + ")"
    return not differing, detail


def _report(criterion: int, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"


@pytest.mark.parametrize("criterion", range(1, 10))
def test_criterion(criterion, capsys):
    ok, detail = evaluate(criterion)
    with capsys.disabled():
        print("\n" + _report(criterion, ok, detail))
    assert ok, detail


def test_criterion_10_determinism(capsys):
    ok, detail = evaluate_determinism()
    with capsys.disabled():
        print("\n" + _report(10, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    bad = 0
    for c in range(1, 10):
        ok, detail = evaluate(c)
        bad += not ok
        print(_report(c, ok, detail), flush=True)
    ok, detail = evaluate_determinism()
    bad += not ok
    print(_report(10, ok, detail), flush=True)
    sys.exit(1 if bad else 0)
