"""Probability that Brownian motion stays in the unit ball: eigen-series in J-zeros.

    P_xi(max_{s<=T} |B_s| < 1) = (2 / |xi|^mu) sum_k J_mu(j_k |xi|) / (j_k J_{mu+1}(j_k)) exp(-j_k^2 T / 2)

with mu = (N - 2) / 2 and j_k the positive zeros of J_mu. Integrating over the
ball gives ``confined_mass``; its first term is ``keylem_bound``, a lower bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from src.analysis.specfun import bessel_j_zeros, sphere_area
from src.utils.errors import DomainError, NumericError, SlowConvergenceError

logger = logging.getLogger(__name__)

_FIRST_BLOCK = 64
_SMALL_RHO = 1e-8


@dataclass(frozen=True)
class SeriesCtl:
    eps_tail: float = 1e-14
    k_max: int = 2000
    t_min: float = 1e-3

    def __post_init__(self) -> None:
        if not self.eps_tail > 0:
            raise DomainError("eps_tail must be positive")
        if self.k_max < 1:
            raise DomainError("k_max must be >= 1")
        if not self.t_min > 0:
            raise DomainError("t_min must be positive")


@dataclass(frozen=True)
class SeriesValue:
    value: float
    terms_used: int
    tail_bound: float

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict[str, float | int]:
        return {"value": self.value, "terms_used": self.terms_used, "tail_bound": self.tail_bound}


def _mu(n: int) -> float:
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return (int(n) - 2) / 2.0


def _check_time(T: float, ctl: SeriesCtl) -> None:
    if not T > 0:
        raise DomainError(f"T must be positive, got {T!r}")
    if T < ctl.t_min:
        raise SlowConvergenceError(
            "eigen-series is not used below t_min; estimate with the Monte Carlo oracle (confinement_mc) instead",
            T=T,
            t_min=ctl.t_min,
        )


def _truncate(bounds: np.ndarray, eps_tail: float) -> tuple[int, float] | None:
    """Smallest K whose remaining-term estimate is below ``eps_tail``.

    Term bounds are log-concave in k (the zero gaps grow), so the tail after K
    is at most b_{K+1} / (1 - b_{K+2} / b_{K+1}).
    """
    b1 = bounds[1:-1]
    b2 = bounds[2:]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(b1 > 0, b2 / b1, 0.0)
    tails = np.where(q < 1, b1 / (1 - np.minimum(q, 1 - 1e-12)), np.inf)
    ok = np.flatnonzero(tails < eps_tail)
    if ok.size == 0:
        return None
    k = int(ok[0]) + 1
    return k, float(tails[ok[0]])


def _series(mu: float, T: float, ctl: SeriesCtl, term_bound) -> tuple[np.ndarray, int, float]:
    """Zeros and truncation point for a series whose k-th term is bounded by ``term_bound(zeros)``."""
    count = min(_FIRST_BLOCK, ctl.k_max + 2)
    while True:
        zeros = bessel_j_zeros(mu, count)
        found = _truncate(term_bound(zeros), ctl.eps_tail)
        if found is not None:
            k, tail = found
            return zeros[:k], k, tail
        if count >= ctl.k_max + 2:
            bounds = term_bound(zeros)
            tail = float(np.sum(bounds[ctl.k_max:])) * 2.0
            logger.warning("series hit k_max=%d at T=%g, residual bound %.3e", ctl.k_max, T, tail)
            return zeros[: ctl.k_max], ctl.k_max, tail
        count = min(4 * count, ctl.k_max + 2)


def confine_prob(N: int, rho: float, T: float, ctl: SeriesCtl = SeriesCtl()) -> SeriesValue:
    """P_xi(max_{0<=s<=T} |B_s| < 1) for |xi| = rho, B Brownian motion in R^N."""
    mu = _mu(N)
    if not 0 <= rho < 1:
        raise DomainError(f"rho must lie in [0, 1), got {rho!r}")
    _check_time(T, ctl)

    if N == 1:
        def bound(zeros: np.ndarray) -> np.ndarray:
            return (2.0 / zeros) * np.exp(-0.5 * zeros**2 * T)

        zeros, k, tail = _series(mu, T, ctl, bound)
        odd = np.arange(1, k + 1)
        terms = ((-1.0) ** (odd - 1)) * (2.0 / zeros) * np.cos(zeros * rho) * np.exp(-0.5 * zeros**2 * T)
    else:
        lead = 1.0 / special.gamma(mu + 1.0)

        def bound(zeros: np.ndarray) -> np.ndarray:
            radial = lead * (zeros / 2.0) ** mu
            # |J_mu(x)| <= (x/2)^mu / Gamma(mu + 1) for mu >= -1/2
            denom = zeros * np.abs(special.jv(mu + 1.0, zeros))
            return 2.0 * radial / denom * np.exp(-0.5 * zeros**2 * T)

        zeros, k, tail = _series(mu, T, ctl, bound)
        if rho < _SMALL_RHO:
            radial = lead * (zeros / 2.0) ** mu
        else:
            radial = special.jv(mu, zeros * rho) / rho**mu
        terms = 2.0 * radial / (zeros * special.jv(mu + 1.0, zeros)) * np.exp(-0.5 * zeros**2 * T)

    value = math.fsum(terms.tolist())
    return SeriesValue(value=min(max(value, 0.0), 1.0), terms_used=k, tail_bound=tail)


def _mass_terms(N: int, T: float, ctl: SeriesCtl) -> tuple[np.ndarray, int, float]:
    mu = _mu(N)
    _check_time(T, ctl)
    scale = 2.0 * sphere_area(N)

    def bound(zeros: np.ndarray) -> np.ndarray:
        return scale / zeros**2 * np.exp(-0.5 * zeros**2 * T)

    return _series(mu, T, ctl, bound)


def confined_mass(N: int, T: float, ctl: SeriesCtl = SeriesCtl()) -> SeriesValue:
    """Ball integral of ``confine_prob``: 2 varpi_N sum_k j_k^{-2} exp(-j_k^2 T / 2)."""
    zeros, k, tail = _mass_terms(N, T, ctl)
    scale = 2.0 * sphere_area(N)
    value = scale * math.fsum((np.exp(-0.5 * zeros**2 * T) / zeros**2).tolist())
    return SeriesValue(value=value, terms_used=k, tail_bound=tail)


def log_confined_mass(N: int, T: float, ctl: SeriesCtl = SeriesCtl()) -> float:
    """log of ``confined_mass`` without underflow at large T."""
    zeros, _, _ = _mass_terms(N, T, ctl)
    j1 = zeros[0]
    rest = math.fsum((np.exp(-0.5 * (zeros**2 - j1**2) * T) / zeros**2).tolist())
    return math.log(2.0 * sphere_area(N)) - 0.5 * j1**2 * T + math.log(rest)


def keylem_bound(N: int, T: float) -> float:
    """Leading term (2 varpi_N / j_1^2) exp(-j_1^2 T / 2) of ``confined_mass``."""
    mu = _mu(N)
    if not T > 0:
        raise DomainError(f"T must be positive, got {T!r}")
    j1 = float(bessel_j_zeros(mu, 1)[0])
    return 2.0 * sphere_area(N) / j1**2 * math.exp(-0.5 * j1**2 * T)


def zero_tail_asymptotic(mu: float, k: int) -> float:
    """sqrt(pi j_k / 2) |J_{mu+1}(j_k)|, which tends to 1 as k grows."""
    if not mu > -0.5:
        raise DomainError(f"zero_tail_asymptotic needs mu > -1/2, got {mu!r}")
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    j = float(bessel_j_zeros(mu, int(k))[int(k) - 1])
    return math.sqrt(math.pi * j / 2.0) * abs(float(special.jv(mu + 1.0, j)))


def rayleigh_sum(mu: float, count: int) -> tuple[float, float]:
    """Partial sum of j_{mu,k}^{-2} over k <= count and the asymptotic estimate of the rest.

    The full sum is 1 / (4 (mu + 1)).
    """
    zeros = bessel_j_zeros(mu, count)
    partial = math.fsum((1.0 / zeros**2).tolist())
    tail = 1.0 / (math.pi**2 * (count + 0.5 * mu + 0.25))
    return partial, tail


def decay_quotient(N: int, T: float, ctl: SeriesCtl = SeriesCtl()) -> float:
    """-(2/T) log confined_mass(N, T); tends to j_1^2 as T grows."""
    return -2.0 / T * log_confined_mass(N, T, ctl)


def decay_rate(N: int, T: float, dT: float = 1.0, ctl: SeriesCtl = SeriesCtl()) -> float:
    """Two-point log-slope of ``confined_mass`` on [T, T + dT], times -2."""
    if not dT > 0:
        raise DomainError("dT must be positive")
    slope = (log_confined_mass(N, T + dT, ctl) - log_confined_mass(N, T, ctl)) / dT
    if not math.isfinite(slope):
        raise NumericError("decay slope is not finite", N=N, T=T, dT=dT)
    return -2.0 * slope
