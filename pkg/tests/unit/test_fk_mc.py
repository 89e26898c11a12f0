import math

import numpy as np
import pytest
from scipy import integrate

from src.analysis.confinement import confine_prob
from src.analysis.thresholds import hardy_constant
from src.pde.radial_heat import heat_reference
from src.simulation import fk_mc
from src.simulation.models import ExperimentGeometry, InitialDatum, PathGrid, PotentialSpec
from src.utils.errors import DomainError

BAND = 4.0


def test_free_fullspace_matches_heat_semigroup(rng, gaussian_bump, short_grid):
    estimate = fk_mc.fk_fullspace(3, PotentialSpec(c=0.0, cap=1.0), gaussian_bump, 0.5, 0.5, short_grid, rng)
    assert estimate.agrees_with(heat_reference(3, gaussian_bump, 0.5, 0.5), BAND)
    assert estimate.n == short_grid.n_paths


def test_constant_potential_scales_by_exponential(rng, gaussian_bump, short_grid):
    c, t = 0.4, 0.5
    estimate = fk_mc.fk_fullspace(2, PotentialSpec(c=c, beta=0.0, cap=1.0), gaussian_bump, t, (0.3, 0.4), short_grid, rng)
    assert estimate.agrees_with(math.exp(c * t) * heat_reference(2, gaussian_bump, t, 0.5), BAND)


def test_bridge_correction_keeps_free_estimate(rng, gaussian_bump):
    grid = PathGrid(t_end=0.5, dt=0.1, n_paths=20_000, bridge_correction=True)
    estimate = fk_mc.fk_fullspace(3, PotentialSpec(c=0.0, cap=1.0), gaussian_bump, 0.5, 0.0, grid, rng)
    assert estimate.agrees_with(heat_reference(3, gaussian_bump, 0.5, 0.0), BAND)


def test_fullspace_needs_cap_and_bulk_flavor(rng, gaussian_bump, short_grid):
    with pytest.raises(DomainError):
        fk_mc.fk_fullspace(3, PotentialSpec(c=0.3), gaussian_bump, 0.5, 0.0, short_grid, rng)
    with pytest.raises(DomainError):
        fk_mc.fk_fullspace(3, PotentialSpec(c=0.3, cap=1.0, flavor="boundary"), gaussian_bump, 0.5, 0.0, short_grid, rng)


def test_time_beyond_grid_horizon_is_rejected(rng, gaussian_bump, short_grid):
    with pytest.raises(DomainError):
        fk_mc.fk_fullspace(3, PotentialSpec(c=0.0, cap=1.0), gaussian_bump, 1.0, 0.0, short_grid, rng)


def test_free_stable_matches_fourier_integral(rng, gaussian_bump, short_grid):
    alpha, t = 1.0, 0.5
    # E exp(i xi X_t) = exp(-t |xi|^alpha) against the transform of exp(-y^2/2)
    exact, _ = integrate.quad(lambda xi: math.sqrt(2.0 / math.pi) * math.exp(-0.5 * xi * xi - t * xi**alpha), 0.0, np.inf)
    estimate = fk_mc.fk_stable(1, alpha, PotentialSpec(c=0.0, beta=alpha, cap=1.0), gaussian_bump, t, 0.0, short_grid, rng)
    assert estimate.agrees_with(exact, BAND)


def test_stable_endpoint_shape(rng):
    draws = fk_mc.stable_endpoint_sample(3, 1.5, 1.0, (1.0, 0.0, 0.0), rng, 10)
    assert draws.shape == (10, 3)


def test_free_halfspace_reflects_symmetric_datum(rng, gaussian_bump, short_grid):
    pot = PotentialSpec(c=0.0, beta=1.0, cap=1.0, flavor="boundary")
    estimate = fk_mc.fk_halfspace(2, pot, gaussian_bump, 0.5, (0.3, 0.4), short_grid, rng)
    assert estimate.agrees_with(heat_reference(2, gaussian_bump, 0.5, 0.5), BAND)


def test_halfspace_constant_datum_without_potential_is_one(rng, short_grid):
    pot = PotentialSpec(c=0.0, flavor="boundary", cap=1.0)
    estimate = fk_mc.fk_halfspace(3, pot, InitialDatum(kind="constant_one"), 0.5, (0.0, 0.0, 0.2), short_grid, rng)
    assert estimate.mean == pytest.approx(1.0, abs=1e-12)


def test_halfspace_rejects_lower_start(rng, gaussian_bump, short_grid):
    pot = PotentialSpec(c=0.2, beta=1.0, cap=1.0, flavor="boundary")
    with pytest.raises(DomainError):
        fk_mc.fk_halfspace(2, pot, gaussian_bump, 0.5, (0.0, -0.1), short_grid, rng)


def test_boundary_potential_raises_halfspace_value(rng, gaussian_bump, short_grid):
    free = fk_mc.fk_halfspace(2, PotentialSpec(c=0.0, flavor="boundary", cap=1.0), gaussian_bump, 0.5, (0.0, 0.1), short_grid, rng)
    charged = fk_mc.fk_halfspace(2, PotentialSpec(c=0.5, beta=1.0, cap=2.0, flavor="boundary"), gaussian_bump, 0.5, (0.0, 0.1), short_grid, rng)
    assert charged.mean > free.mean


def test_bessel_coefficient_vanishes_at_hardy_constant():
    assert fk_mc.bessel_exponent_coefficient(5, hardy_constant(5)) == 0.0
    assert fk_mc.bessel_exponent_coefficient(3, 1.0) == pytest.approx(0.875)


def test_bessel_identity_argument_checks(rng, gaussian_bump, short_grid):
    with pytest.raises(DomainError):
        fk_mc.fk_radial_bessel(3, 0.1, 1.0, gaussian_bump, 0.5, 0.0, short_grid, rng)
    with pytest.raises(DomainError):
        fk_mc.fk_radial_bessel(2, 0.1, 1.0, gaussian_bump, 0.5, 1.0, short_grid, rng)
    off_centre = InitialDatum(center=(1.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        fk_mc.fk_radial_bessel(3, 0.1, 1.0, off_centre, 0.5, 1.0, short_grid, rng)


def test_confinement_random_walk_matches_series(rng):
    estimate = fk_mc.confinement_mc(3, 0.0, 0.3, 20_000, 200, rng)
    assert estimate.agrees_with(confine_prob(3, 0.0, 0.3).value, BAND, rel=0.01)


def test_confinement_random_walk_argument_checks(rng):
    with pytest.raises(DomainError):
        fk_mc.confinement_mc(2, 1.0, 0.3, 100, 10, rng)
    with pytest.raises(DomainError):
        fk_mc.confinement_mc(2, 0.0, 0.3, 100, 0, rng)


def test_event_probability_decreases_in_n():
    geo = ExperimentGeometry()
    probs = [fk_mc.event_probability(3, geo, 1.0, 0.0, n) for n in (2, 3, 4)]
    assert all(0 < b < a < 1 for a, b in zip(probs, probs[1:]))


@pytest.mark.parametrize("N", [2, 3, 4])
def test_event_rate_close_to_first_zero(N):
    fit = fk_mc.event_rate_probe(N, ExperimentGeometry(), 1.0, 0.0, range(2, 9))
    assert fit.relative_error < 0.1
    assert float(fit) == fit.rate
    assert fit.divergence_coefficient(fit.rate) == 0.0


def test_event_rate_needs_three_points():
    with pytest.raises(DomainError):
        fk_mc.event_rate_probe(3, ExperimentGeometry(), 1.0, 0.0, [2, 3])


def test_boundary_probe_dominates_bound_and_grows():
    geo = ExperimentGeometry()
    probes = [fk_mc.boundary_In_probe(nu, 1.0, 0.3, geo) for nu in (2.0, 4.0, 6.0)]
    assert all(p.value >= p.bound > 0 for p in probes)
    assert probes[0].value < probes[1].value < probes[2].value
    assert probes[0].to_dict()["margin"] == pytest.approx(probes[0].value - probes[0].bound)


def test_boundary_bound_is_built_from_its_constants():
    geo = ExperimentGeometry()
    nu, t = 3.0, 1.0
    probe = fk_mc.boundary_In_probe(nu, t, 0.3, geo)
    expected = probe.c1 * probe.c2 * nu * math.exp(0.5 * nu * nu * geo.gamma * t - 2.0 * nu)
    assert probe.bound == pytest.approx(expected, rel=1e-12)
    assert 0.0 < probe.c1 < 1.0 and 0.0 < probe.c2 < 1.0


def test_boundary_probe_without_weight_is_interval_mass():
    geo = ExperimentGeometry()
    probe = fk_mc.boundary_In_probe(0.0, 1.0, 0.3, geo)
    assert 0.0 < probe.value < 1.0
    assert probe.bound == 0.0


def test_sweep_is_monotone_in_the_cap(rng):
    grid = PathGrid(t_end=0.2, dt=0.01, n_paths=4000)
    report = fk_mc.threshold_sweep("fullspace", 3, [0.02, 0.5], [1.0, 2.0, 4.0], 0.2, 0.0, grid, rng)
    assert report.monotone_violations == 0
    for row in report.rows:
        means = [e.mean for e in row.estimates]
        assert means == sorted(means)
        assert all(r >= 1.0 for r in row.ratios)
    assert report.rows[0].verdict == "plateau"
    assert report.rows[0].position.zone == "below_best"
    assert len(report.csv_rows()) == 6
    assert report.csv_rows()[0][4] is None


def test_sweep_argument_checks(rng, short_grid):
    with pytest.raises(DomainError):
        fk_mc.threshold_sweep("fullspace", 3, [0.1], [2.0, 1.0], 0.5, 0.0, short_grid, rng)
    with pytest.raises(DomainError):
        fk_mc.threshold_sweep("stable", 3, [0.1], [1.0, 2.0], 0.5, 0.0, short_grid, rng)
    with pytest.raises(DomainError):
        fk_mc.threshold_sweep("halfspace", 2, [0.1], [1.0, 2.0], 0.5, (0.0, -1.0), short_grid, rng)
