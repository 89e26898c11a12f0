import math

import pytest

from src.analysis import confinement
from src.analysis.specfun import ball_volume, bessel_j_zero
from src.utils.errors import DomainError, SlowConvergenceError

T_GRID = (0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0)


def test_one_dimensional_series_is_a_probability_near_one_for_short_times():
    value = confinement.confine_prob(1, 0.0, 0.01).value
    assert 0.999 < value <= 1.0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_start_near_the_sphere_exits_at_once(N):
    assert confinement.confine_prob(N, 0.999, 0.5).value < 0.01


def test_centre_matches_small_radius_limit():
    centre = confinement.confine_prob(3, 0.0, 0.4).value
    nearby = confinement.confine_prob(3, 1e-6, 0.4).value
    assert centre == pytest.approx(nearby, abs=1e-10)


def test_three_dimensional_centre_has_closed_series():
    # J_{1/2} zeros are k pi: P_0 = 2 sum (-1)^{k+1} exp(-k^2 pi^2 T / 2)
    T = 0.3
    expected = 2.0 * math.fsum((-1) ** (k + 1) * math.exp(-0.5 * (k * math.pi) ** 2 * T) for k in range(1, 60))
    assert confinement.confine_prob(3, 0.0, T).value == pytest.approx(expected, abs=1e-12)


def test_series_value_reports_terms_and_tail():
    result = confinement.confine_prob(2, 0.3, 0.2)
    assert result.terms_used >= 1
    assert result.tail_bound <= 1e-14
    assert float(result) == result.value


def test_rejects_bad_arguments():
    with pytest.raises(DomainError):
        confinement.confine_prob(3, 1.0, 0.5)
    with pytest.raises(DomainError):
        confinement.confine_prob(3, 0.2, 0.0)
    with pytest.raises(SlowConvergenceError):
        confinement.confine_prob(3, 0.2, 1e-5)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_strictly_decreasing_in_time_and_radius(N):
    in_time = [confinement.confine_prob(N, 0.3, T).value for T in T_GRID]
    in_radius = [confinement.confine_prob(N, rho, 0.5).value for rho in (0.0, 0.2, 0.4, 0.6, 0.8, 0.9)]
    assert all(later < earlier for earlier, later in zip(in_time, in_time[1:]))
    assert all(outer < inner for inner, outer in zip(in_radius, in_radius[1:]))


def test_series_control():
    loose = confinement.SeriesCtl(eps_tail=1e-6)
    assert confinement.confine_prob(3, 0.2, 0.05, loose).terms_used <= confinement.confine_prob(3, 0.2, 0.05).terms_used
    short = confinement.confine_prob(3, 0.0, 1e-4, confinement.SeriesCtl(t_min=1e-5))
    assert short.value == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DomainError):
        confinement.SeriesCtl(k_max=0)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("T", T_GRID)
def test_confined_mass_dominates_leading_term(N, T):
    assert confinement.confined_mass(N, T).value >= confinement.keylem_bound(N, T)


def test_keylem_bound_closed_forms():
    T = 0.7
    assert confinement.keylem_bound(1, T) == pytest.approx(16.0 / math.pi**2 * math.exp(-(math.pi**2) * T / 8.0), rel=1e-12)
    assert confinement.keylem_bound(3, T) == pytest.approx(8.0 / math.pi * math.exp(-(math.pi**2) * T / 2.0), rel=1e-12)


def test_one_dimensional_mass_approaches_leading_term():
    T = 6.0
    ratio = confinement.confined_mass(1, T).value / (16.0 / math.pi**2 * math.exp(-(math.pi**2) * T / 8.0))
    assert ratio == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_small_time_mass_tends_to_ball_volume(N):
    value = confinement.confined_mass(N, 1e-3).value
    assert value == pytest.approx(ball_volume(N), rel=0.2)
    assert value < ball_volume(N)


@pytest.mark.parametrize("mu", [-0.5, 0.0, 0.5, 1.5])
def test_rayleigh_sum(mu):
    partial, tail = confinement.rayleigh_sum(mu, 2000)
    assert abs(partial + tail - 1.0 / (4.0 * (mu + 1.0))) < 1e-6


def test_zero_tail_asymptotic():
    for k in (1, 5, 40):
        assert confinement.zero_tail_asymptotic(0.5, k) == pytest.approx(1.0, abs=1e-12)
    assert confinement.zero_tail_asymptotic(0.0, 1) == pytest.approx(1.009, abs=2e-3)
    assert confinement.zero_tail_asymptotic(0.0, 200) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_decay_rate_at_moderate_time(N):
    j1 = bessel_j_zero((N - 2) / 2.0, 1)
    assert confinement.decay_rate(N, 10.0) == pytest.approx(j1**2, rel=0.01)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_decay_quotient_at_long_time(N):
    j1 = bessel_j_zero((N - 2) / 2.0, 1)
    assert confinement.decay_quotient(N, 100.0) == pytest.approx(j1**2, rel=0.01)


def test_log_mass_agrees_with_mass():
    assert confinement.log_confined_mass(2, 1.5) == pytest.approx(math.log(confinement.confined_mass(2, 1.5).value), rel=1e-12)
