"""End-to-end acceptance suite: every criterion exact, one line per verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS lines, or
``liecert selftest`` for the CLI equivalent.
"""

import pytest

from liecert.selfcheck import CRITERIA, run_criteria

SEED = 2024


@pytest.mark.parametrize("number,name,fn", CRITERIA, ids=[f"criterion-{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, fn):
    (result,) = run_criteria({number}, seed=SEED)
    status = "PASS" if result.ok else "FAIL"
    print(f"{status} criterion {number}: {name} [{result.seconds:.2f}s] {result.detail}")
    assert result.ok, f"criterion {number} ({name}): {result.detail}"


def test_criteria_cover_one_through_ten():
    assert [n for n, _, _ in CRITERIA] == list(range(1, 11))
