import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from src.sampling import laws
from src.sampling.estimate import MCEstimate
from src.sampling.rng import RngStream
from src.utils.errors import DomainError

N_DRAWS = 200_000
BAND = 4.0


def within_band(samples, exact):
    estimate = MCEstimate.from_samples(samples)
    return abs(estimate.mean - exact) < BAND * estimate.std_err


def test_subordinator_laplace_closed_form():
    assert laws.subordinator_laplace(1.0, 1.0, 4.0) == pytest.approx(math.exp(-2.0))
    assert laws.subordinator_laplace(0.7, 2.0, 0.0) == 1.0
    assert laws.subordinator_laplace(1.3, 0.0, 5.0) == 1.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_subordinator_sample_matches_laplace(alpha):
    draws = laws.subordinator_sample(alpha, 1.0, RngStream(1, 2), N_DRAWS)
    assert np.all(draws > 0)
    assert within_band(np.exp(-draws), laws.subordinator_laplace(alpha, 1.0, 1.0))


def test_subordinator_time_scaling():
    alpha = 1.2
    small = laws.subordinator_sample(alpha, 0.5, RngStream(3), 50_000)
    unit = laws.subordinator_sample(alpha, 1.0, RngStream(4), 50_000)
    assert stats.ks_2samp(small / 0.5 ** (2.0 / alpha), unit).pvalue > 1e-3


def test_subordinator_half_is_first_passage():
    subordinator = laws.subordinator_sample(1.0, 1.0, RngStream(5), 50_000)
    passage = laws.hitting_time_sample(1.0 / math.sqrt(2.0), RngStream(6), 50_000)
    assert stats.ks_2samp(subordinator, passage).pvalue > 1e-3


def test_subordinator_rejects_alpha_two():
    with pytest.raises(DomainError):
        laws.subordinator_sample(2.0, 1.0, RngStream(0))


def test_hitting_time_laplace_and_median():
    draws = laws.hitting_time_sample(1.0, RngStream(7), N_DRAWS)
    assert within_band(np.exp(-draws), laws.hitting_time_laplace(1.0, 1.0))
    assert np.median(draws) == pytest.approx(1.0 / stats.norm.ppf(0.75) ** 2, rel=0.02)


def test_hitting_time_cdf_is_density_integral():
    value, _ = integrate.quad(lambda s: laws.hitting_time_density(1.5, s), 0.0, 3.0)
    assert laws.hitting_time_cdf(1.5, 3.0) == pytest.approx(value, rel=1e-9)


@pytest.mark.parametrize("x", [0.0, 0.4, -0.8])
def test_box_law_total_mass(x):
    assert laws.local_time_joint(x, 0.7).total_mass() == pytest.approx(1.0, abs=1e-8)


def test_box_law_atom_vanishes_at_origin():
    assert laws.local_time_joint(0.0, 1.0).atom == 0.0


@pytest.mark.parametrize("z", [-1.3, -0.2, 0.5, 2.0])
def test_box_law_endpoint_marginal_is_gaussian(z):
    x, s = 0.6, 0.9
    expected = math.exp(-((z - x) ** 2) / (2 * s)) / math.sqrt(2 * math.pi * s)
    assert laws.local_time_joint(x, s).endpoint_marginal(z) == pytest.approx(expected, rel=1e-12)


def test_local_time_sampler_matches_box_expectation():
    kappa, s, x = 1.0, 1.0, 0.3
    local_time, endpoint = laws.local_time_joint_sample(x, s, RngStream(8), N_DRAWS)
    weights = np.exp(kappa * local_time) * (np.abs(endpoint) < 1.0)
    assert within_band(weights, laws.local_time_exp_box(kappa, s, x))


def test_local_time_endpoint_is_gaussian():
    x, s = 0.3, 1.0
    _, endpoint = laws.local_time_joint_sample(x, s, RngStream(9), 100_000)
    assert stats.kstest(endpoint, stats.norm(loc=x, scale=math.sqrt(s)).cdf).pvalue > 0.01


def test_local_time_and_abs_endpoint_share_the_running_max_law():
    s = 0.7
    local_time, endpoint = laws.local_time_joint_sample(0.0, s, RngStream(16), 100_000)
    running_max = stats.halfnorm(scale=math.sqrt(s)).cdf
    assert stats.kstest(local_time, running_max).pvalue > 0.01
    assert stats.kstest(np.abs(endpoint), running_max).pvalue > 0.01


def test_far_start_rarely_reaches_origin():
    local_time, _ = laws.local_time_joint_sample(10.0, 1.0, RngStream(10), 10_000)
    assert np.count_nonzero(local_time) == 0


def test_per_path_arrays_are_accepted():
    x = np.linspace(-1.0, 1.0, 7)
    s = np.full(7, 0.5)
    local_time, endpoint = laws.local_time_joint_sample(x, s, RngStream(11))
    assert local_time.shape == endpoint.shape == (7,)
    assert np.all(local_time >= 0)


def test_box_expectation_without_weight_is_gaussian_mass():
    s, x = 0.8, 0.2
    expected = special.ndtr((1 - x) / math.sqrt(s)) - special.ndtr((-1 - x) / math.sqrt(s))
    assert laws.local_time_exp_box(0.0, s, x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("kappa, s, x", [(0.5, 1.0, 0.0), (2.0, 0.5, 0.7), (3.0, 2.0, -0.4)])
def test_box_expectation_above_lower_bound(kappa, s, x):
    assert laws.local_time_exp_box(kappa, s, x) >= laws.local_time_exp_box_lower(kappa, s)


def test_weighted_expectation_generalizes_box():
    kappa, s, x = 1.5, 0.6, 0.25
    box = laws.local_time_exp_weighted(kappa, s, x, lambda z: 1.0 if abs(z) < 1.0 else 0.0, breakpoints=(-1.0, 1.0))
    assert box == pytest.approx(laws.local_time_exp_box(kappa, s, x), rel=1e-7)


def test_local_time_box_rejects_outside_start():
    with pytest.raises(DomainError):
        laws.local_time_exp_box(1.0, 1.0, 1.0)


def test_last_zero_sampler():
    t = 2.0
    draws = laws.last_zero_sample(t, RngStream(12), 100_000)
    assert np.all((draws > 0) & (draws < t))
    assert np.mean(draws) == pytest.approx(t / 2.0, abs=4 * t / math.sqrt(8 * 100_000))
    assert stats.kstest(draws, lambda v: laws.last_zero_cdf(v, t)).pvalue > 0.01


def test_meander_endpoint_mean():
    dur = 0.7
    draws = laws.meander_endpoint_sample(dur, RngStream(13), N_DRAWS)
    assert within_band(draws, math.sqrt(math.pi * dur / 2.0))
    assert stats.kstest(draws, lambda y: laws.meander_endpoint_cdf(y, dur)).pvalue > 0.01


def test_last_zero_decomposition_endpoint_is_half_normal():
    _, endpoint = laws.last_zero_decomposition_sample(1.0, RngStream(14), 100_000)
    assert stats.kstest(endpoint, stats.halfnorm().cdf).pvalue > 0.01


def test_scalar_draws_are_floats():
    assert isinstance(laws.subordinator_sample(1.0, 1.0, RngStream(15)), float)
    assert isinstance(laws.hitting_time_sample(1.0, RngStream(15)), float)
    lt, end = laws.local_time_joint_sample(0.2, 1.0, RngStream(15))
    assert isinstance(lt, float) and isinstance(end, float)


def test_bessel_transition_density_normalized():
    mass, _ = integrate.quad(lambda xi: laws.bessel_transition_density(3.0, 1.0, 1.0, xi), 0.0, np.inf, epsabs=1e-13, epsrel=1e-11)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_bessel_transition_density_dimension_three_closed_form():
    r, t, xi = 0.8, 0.6, 1.3
    expected = xi / r / math.sqrt(2 * math.pi * t) * (math.exp(-((xi - r) ** 2) / (2 * t)) - math.exp(-((xi + r) ** 2) / (2 * t)))
    assert laws.bessel_transition_density(3.0, r, t, xi) == pytest.approx(expected, rel=1e-12)


def test_bessel_transition_matches_norm_of_three_dimensional_motion():
    gen = RngStream(16).generator()
    points = np.array([1.0, 0.0, 0.0]) + gen.standard_normal((50_000, 3))
    radii = np.linalg.norm(points, axis=1)
    assert stats.kstest(radii, lambda y: laws.bessel_transition_cdf(3.0, 1.0, 1.0, y)).pvalue > 0.01


@pytest.mark.parametrize("z", [0.05, 0.2, 0.5, 2.0, 10.0])
def test_theta_is_nonnegative(z):
    assert laws.hartman_watson_theta(1.0, z).value >= -1e-8


def test_theta_large_z_tends_to_k0():
    z, value = laws.hw_large_z_limit(1.0)
    assert value == pytest.approx(special.k0(1.0), rel=0.02)
    assert z >= 16.0


def test_hw_joint_density_z_marginal():
    marginal = laws.hw_z_marginal(3.0, 1.0, 1.0, 1.0)
    assert marginal == pytest.approx(laws.bessel_transition_density(3.0, 1.0, 1.0, 1.0), rel=1e-6)


def test_hw_joint_density_dimension_two_has_no_index_factor():
    r, t, z, xi = 1.0, 1.0, 0.8, 1.2
    theta = laws.hartman_watson_theta(r * xi / t, z).value
    expected = xi / t * math.exp(-(r * r + xi * xi) / (2 * t)) * theta
    assert laws.hw_joint_density(2.0, r, t, z, xi) == pytest.approx(expected, rel=1e-12)


def test_hartman_watson_rejects_nonpositive():
    with pytest.raises(DomainError):
        laws.hartman_watson_theta(0.0, 1.0)


def test_truncated_transition_integral_grows_logarithmically():
    s, t, r, y = 0.5, 1.0, 1.0, 1.0
    eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    values = [laws.divtrans_truncated(s, t, r, y, e) for e in eps]
    assert all(b > a for a, b in zip(values, values[1:]))
    slope = laws.fit_log_slope(eps, values)
    assert slope > 0
    assert slope == pytest.approx(laws.divtrans_log_slope_limit(s, t, r, y), rel=0.05)


def test_truncated_cauchy_integral_grows_logarithmically():
    s, t, x, y = 0.5, 1.0, 0.3, -0.2
    eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    values = [laws.condfr_truncated(s, t, x, y, e) for e in eps]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert laws.fit_log_slope(eps, values) == pytest.approx(laws.condfr_log_slope_limit(s, t, x, y), rel=0.02)


def test_truncated_cauchy_integral_symmetric_at_half_time():
    assert laws.condfr_truncated(0.5, 1.0, 0.3, -0.6, 1e-3) == pytest.approx(laws.condfr_truncated(0.5, 1.0, -0.6, 0.3, 1e-3), rel=1e-9)


def test_cauchy_kernel_is_a_density():
    mass, _ = integrate.quad(lambda x: laws.cauchy_kernel(0.7, x), -np.inf, np.inf)
    assert mass == pytest.approx(1.0, rel=1e-9)
