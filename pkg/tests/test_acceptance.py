"""Acceptance gate: every criterion at its stated tolerance, full profile.

Run with -v to see one test per criterion; each prints its PASS/FAIL line
with the elapsed time and asserts both the checks and the runtime budget.
"""

import pytest

from conifold_lab.acceptance import CRITERIA, Profile, run_criterion

FULL = Profile.full(seed=0)


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid):
    result = run_criterion(cid, FULL)
    print(result.line())
    for name, info in result.details.items():
        print(f"    {name}: {info}")
    assert result.passed, "; ".join(result.failures)
    assert result.elapsed < result.budget
