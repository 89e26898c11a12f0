import math

import pytest

from src.evaluation.checks import APPENDIX_CHECKS, LAW_CHECKS, CheckOptions, run_checks
from src.utils.errors import DomainError

SMALL = CheckOptions(n_draws=20_000, n_sigma=4.0)


def test_registries_hold_every_named_check():
    assert set(LAW_CHECKS) == {"subordinator_laplace", "hitting_laplace", "local_time_box", "levy_equivalence", "hartman_watson"}
    assert set(APPENDIX_CHECKS) == {"cauchy_cf", "relativistic_cf", "prelat", "decomp", "phi"}


def test_deterministic_checks_pass(rng):
    (phi,) = run_checks("appendix", ["phi"], rng, SMALL)
    (hw,) = run_checks("law", ["hartman_watson"], rng, SMALL)
    assert phi.passed and len(phi.statistics["rows"]) == 12
    assert hw.passed
    assert hw.statistics["marginal_rel_err"] < 1e-6


@pytest.mark.parametrize("name", ["hitting_laplace", "local_time_box", "levy_equivalence"])
def test_small_law_checks_pass(rng, name):
    (report,) = run_checks("law", [name], rng, SMALL)
    assert report.passed, report.statistics


def test_levy_check_compares_local_time_with_running_max(rng):
    (report,) = run_checks("law", ["levy_equivalence"], rng, SMALL)
    assert report.statistics["p_min"] == 0.01
    for key in ("local_time_vs_running_max", "abs_endpoint_vs_running_max"):
        assert report.statistics[key]["pvalue"] > 0.01


@pytest.mark.parametrize("name", ["cauchy_cf", "relativistic_cf"])
def test_small_transform_checks_pass(rng, name):
    (report,) = run_checks("appendix", [name], rng, SMALL)
    assert report.passed, report.statistics
    assert len(report.statistics["rows"]) == 3


def test_cauchy_check_runs_in_the_plane(rng):
    (report,) = run_checks("appendix", ["cauchy_cf"], rng, SMALL)
    assert report.statistics["d"] == 2
    assert [row["arg"] for row in report.statistics["rows"]] == [[0.5, 0.0], [0.6, 0.8], [1.2, 1.6]]
    assert [row["exact"] for row in report.statistics["rows"]] == pytest.approx([math.exp(-0.5), math.exp(-1.0), math.exp(-2.0)])


def test_check_streams_depend_on_the_name_only(rng):
    first = run_checks("law", ["hitting_laplace"], rng, SMALL)[0]
    both = run_checks("law", ["subordinator_laplace", "hitting_laplace"], rng, SMALL)
    assert both[1].statistics == first.statistics


def test_unknown_names_and_groups(rng):
    with pytest.raises(DomainError):
        run_checks("law", ["no_such_check"], rng, SMALL)
    with pytest.raises(DomainError):
        run_checks("bogus", None, rng, SMALL)


def test_report_serializes(rng):
    (report,) = run_checks("appendix", ["phi"], rng, SMALL)
    data = report.to_dict()
    assert data["name"] == "phi" and data["passed"] is True
