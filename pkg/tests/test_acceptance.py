"""Acceptance criteria 1-13, one printed pass/fail line per criterion."""

import time

import pytest

from transdirac.acceptance import CHECKS, format_result, run_checks, runtime_result


@pytest.fixture(scope="module")
def results():
    start = time.perf_counter()
    done = run_checks(CHECKS)
    return done + [runtime_result(time.perf_counter() - start)]


@pytest.mark.parametrize("criterion", range(1, 14))
def test_criterion(criterion, results, capsys):
    mine = [r for r in results if r.criterion == criterion]
    assert mine, f"no checks registered for criterion {criterion}"
    ok = all(r.passed for r in mine)
    with capsys.disabled():
        print(f"\ncriterion {criterion:>2}: {'PASS' if ok else 'FAIL'}")
        for r in mine:
            print("    " + format_result(r))
    assert ok, "; ".join(format_result(r) for r in mine if not r.passed)
