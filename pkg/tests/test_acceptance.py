"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 1-12 are computed once per session; criterion 13 reruns them in a
fresh interpreter and compares the written files byte for byte.
"""

import pytest

from hypbubble.verify import CHECKS, check_determinism, run_check, write_results

SEED = 0


@pytest.fixture(scope="session")
def results():
    return {n: run_check(n, seed=SEED, threads=2) for n in sorted(CHECKS)}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(results, number, report_line):
    r = results[number]
    print(r.line())
    report_line(r.line())
    passed = r.passed
    assert passed, r.detail


def test_criterion_13_determinism(results, tmp_path, report_line):
    write_results(list(results.values()), tmp_path)
    r = check_determinism(tmp_path, sorted(results), seed=SEED, threads=2)
    print(r.line())
    report_line(r.line())
    passed = r.passed
    assert passed, r.detail
