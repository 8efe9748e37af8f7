"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line; the lines are
repeated in the pytest terminal summary. Run as a script for the lines only::

    python tests/test_acceptance.py
"""
import sys

import pytest

from weighted_minkowski.acceptance import RUNNERS

RESULTS = []


@pytest.mark.slow
@pytest.mark.parametrize("runner", RUNNERS, ids=[f"criterion_{k}" for k in range(1, len(RUNNERS) + 1)])
def test_criterion(runner):
    crit = runner()
    RESULTS.append(crit.line)
    print(crit.line)
    assert crit.passed, f"{crit.line}\n{crit.detail}"


if __name__ == "__main__":
    failed = 0
    for runner in RUNNERS:
        crit = runner()
        print(crit.line, flush=True)
        failed += not crit.passed
    sys.exit(1 if failed else 0)
