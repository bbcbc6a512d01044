"""Smoke coverage for the self-check suites."""

import pytest

from diqkd import SUITES, run_suites
from diqkd.verify import suite_monotonicity, suite_symmetrization


def test_all_suites_pass_quick():
    reports = run_suites(("all",), quick=True)
    assert [r.name for r in reports] == list(SUITES)
    for rep in reports:
        assert rep.passed, rep.summary()
        assert rep.checks > 0
        assert rep.failures == ()


def test_suite_selection_and_order():
    reports = run_suites(("symmetrization", "monotonicity"), quick=True)
    assert [r.name for r in reports] == ["symmetrization", "monotonicity"]


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suites(("bogus",), quick=True)


def test_summary_line_format():
    rep = suite_symmetrization(n_draws=5)
    line = rep.summary()
    assert line.startswith("symmetrization: pass")
    assert "checks" in line and "slack" in line


def test_monotonicity_detector_not_vacuous():
    # an impossible slack demand must generate failures, proving the check bites
    rep = suite_monotonicity(n_draws=5, n_grid=21, slack=-1.0)
    assert not rep.passed
    assert rep.failures
