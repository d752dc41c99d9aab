import pytest

from services import validation
from services.validation import CheckResult, _check, _monotone_gap


def test_monotone_gap():
    assert _monotone_gap([1.0, 2.0, 3.0], increasing=True) == -1.0
    assert _monotone_gap([1.0, 3.0, 2.5], increasing=True) == 0.5
    assert _monotone_gap([3.0, 2.0, 2.1], increasing=False) == pytest.approx(0.1)


def test_ties_fail_a_strict_check():
    gap = _monotone_gap([1.0, 1.0, 2.0], increasing=True)
    assert gap == 0.0
    assert not _check("flat", gap, 0.0, strict=True).passed
    assert _check("flat", gap, 0.0).passed
    assert _check("rising", _monotone_gap([1.0, 1.5, 2.0], increasing=True), 0.0, strict=True).passed


def test_closed_form_suite(config):
    results = validation.closed_form_suite(config, quick=True)
    assert len(results) == 2
    assert all(r.passed for r in results)


def test_reduction_suite(config):
    results = validation.reduction_suite(config, quick=False)
    assert len(results) == 4
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_monotonicity_suite(config):
    results = validation.monotonicity_suite(config, quick=True)
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_sandwich_suite(config):
    results = validation.sandwich_suite(config, quick=True)
    assert [r.name for r in results] == ["sandwich[cpc]", "sandwich[upc]", "sandwich[fpc]", "sandwich[apc]"]
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_monte_carlo_suite_reports_every_check(config):
    results = validation.monte_carlo_suite(config, quick=True)
    assert [r.name for r in results] == ["mc_vs_closed_form[hd,p_dl]", "mc_in_bounds[cpc,dl]", "mc_in_bounds[cpc,ul]"]
    assert all(r.tolerance > 0 for r in results)


def test_run_suites_collects_failures(config, monkeypatch):
    monkeypatch.setattr(
        validation,
        "SUITES",
        (
            lambda c, quick: [CheckResult(name="ok", gap=0.0, tolerance=1.0, passed=True)],
            lambda c, quick: [CheckResult(name="bad", gap=2.0, tolerance=1.0, passed=False)],
        ),
    )
    results = validation.run_suites(config, quick=True)
    assert [r.passed for r in results] == [True, False]
