"""Exact laws of Brownian path functionals: densities, transforms and samplers.

Samplers accept an ``RngStream`` (replayable) or a numpy ``Generator`` and a
``size``; with ``size=None`` they return a float.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate, special

from src.sampling.rng import RngLike, as_generator, open_uniform
from src.utils.errors import DomainError, NumericError

logger = logging.getLogger(__name__)

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# below these z the exp(pi^2/2z) and exp(pi^2/8z) prefactors cost more than 6 digits in float
HW_DIRECT_MIN_Z = 0.36
HW_FLOAT_MIN_Z = 0.09
# e^{-rho (cosh y - 1)} < 1e-16
HW_TRUNCATION = 36.84


def _scalar_or_array(values: np.ndarray, size) -> float | np.ndarray:
    return float(values) if size is None and np.ndim(values) == 0 else values


def _g1(s, x):
    return np.exp(-np.square(x) / (2.0 * s)) / np.sqrt(2.0 * np.pi * s)


def _exp_erfc(a, b):
    """exp(a) * erfc(b) without overflow or cancellation for large positive b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.where(b > 0, np.exp(a - b * b) * special.erfcx(np.maximum(b, 0.0)), np.exp(a) * special.erfc(b))


# --- stable subordinator ------------------------------------------------------


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 2:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha!r}")


def subordinator_laplace(alpha: float, t: ArrayLike, lam: ArrayLike) -> float | np.ndarray:
    """E exp(-lam T_t) = exp(-t lam^{alpha/2})."""
    _check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(t < 0) or np.any(lam < 0):
        raise DomainError("subordinator_laplace needs t >= 0 and lam >= 0")
    out = np.exp(-t * lam ** (alpha / 2.0))
    return float(out) if out.ndim == 0 else out


def subordinator_sample(alpha: float, t: float, rng: RngLike, size=None) -> float | np.ndarray:
    """T_t of the alpha/2-stable subordinator, Kanter's representation.

    With rho = alpha / 2, U uniform on (0, pi) and E standard exponential,
        S = sin(rho U) sin((1 - rho) U)^{(1-rho)/rho} / sin(U)^{1/rho} * E^{-(1-rho)/rho}
    has E exp(-lam S) = exp(-lam^rho); then T_t = t^{2/alpha} S.
    """
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    gen = as_generator(rng)
    rho = alpha / 2.0
    u = math.pi * open_uniform(gen, size)
    e = gen.standard_exponential(size)
    log_s = (
        np.log(np.sin(rho * u))
        + (1.0 - rho) / rho * (np.log(np.sin((1.0 - rho) * u)) - np.log(e))
        - np.log(np.sin(u)) / rho
    )
    return _scalar_or_array(t ** (1.0 / rho) * np.exp(log_s), size)


# --- first passage ------------------------------------------------------------


def hitting_time_sample(a: float, rng: RngLike, size=None) -> float | np.ndarray:
    """tau_a = inf{s : max_{u<=s} W_u > a}, exactly as (a / Z)^2."""
    if not a > 0:
        raise DomainError(f"level must be positive, got {a!r}")
    z = as_generator(rng).standard_normal(size)
    return _scalar_or_array((a / z) ** 2, size)


def hitting_time_laplace(a: float, lam: ArrayLike) -> float | np.ndarray:
    out = np.exp(-a * np.sqrt(2.0 * np.asarray(lam, dtype=float)))
    return float(out) if out.ndim == 0 else out


def hitting_time_cdf(a: float, s: ArrayLike) -> float | np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.where(s > 0, special.erfc(a / np.sqrt(2.0 * np.maximum(s, 1e-300))), 0.0)
    return float(out) if out.ndim == 0 else out


def hitting_time_density(a: float, s: ArrayLike) -> float | np.ndarray:
    s = np.asarray(s, dtype=float)
    out = a / np.sqrt(2.0 * np.pi * s**3) * np.exp(-a * a / (2.0 * s))
    return float(out) if out.ndim == 0 else out


# --- local time at zero and endpoint ------------------------------------------


@dataclass(frozen=True)
class BoxLaw:
    """Joint law of (L_s, B_s) for Brownian motion from x; L is the local time at 0.

    The part {L = 0} has total weight ``atom`` and lives on the side of x;
    the rest has density (y + |z| + |x|) / sqrt(2 pi s^3) exp(-(y + |z| + |x|)^2 / 2s).
    """

    x: float
    s: float

    @property
    def atom(self) -> float:
        return math.erf(abs(self.x) / math.sqrt(2.0 * self.s))

    def atom_density(self, z: ArrayLike) -> float | np.ndarray:
        z = np.asarray(z, dtype=float)
        same_side = z * self.x > 0
        out = np.where(same_side, _g1(self.s, z - self.x) * -np.expm1(-2.0 * self.x * z / self.s), 0.0)
        return float(out) if out.ndim == 0 else out

    def density(self, y: ArrayLike, z: ArrayLike) -> float | np.ndarray:
        y = np.asarray(y, dtype=float)
        c = y + np.abs(np.asarray(z, dtype=float)) + abs(self.x)
        out = np.where(y > 0, c / math.sqrt(2.0 * math.pi * self.s**3) * np.exp(-c * c / (2.0 * self.s)), 0.0)
        return float(out) if out.ndim == 0 else out

    def endpoint_marginal(self, z: ArrayLike) -> float | np.ndarray:
        """Atom density plus the y-integral of the density, g_1(s, |z| + |x|)."""
        z = np.asarray(z, dtype=float)
        out = self.atom_density(z) + _g1(self.s, np.abs(z) + abs(self.x))
        return float(out) if np.ndim(out) == 0 else out

    def total_mass(self) -> float:
        """atom + the double integral of ``density``, by nested quadrature."""

        def inner(z: float) -> float:
            return integrate.quad(lambda y: self.density(y, z), 0.0, np.inf, epsabs=1e-13, epsrel=1e-11)[0]

        continuous = 2.0 * integrate.quad(inner, 0.0, np.inf, epsabs=1e-12, epsrel=1e-11, limit=200)[0]
        atom_part = integrate.quad(
            self.atom_density, *((0.0, np.inf) if self.x >= 0 else (-np.inf, 0.0)), epsabs=1e-13, epsrel=1e-11
        )[0]
        return atom_part + continuous

    def sample(self, rng: RngLike, size=None):
        return local_time_joint_sample(self.x, self.s, rng, size)


def local_time_joint(x: float, s: float) -> BoxLaw:
    if not s > 0:
        raise DomainError(f"s must be positive, got {s!r}")
    return BoxLaw(x=float(x), s=float(s))


def local_time_joint_sample(x: ArrayLike, s: ArrayLike, rng: RngLike, size=None):
    """Exact draw of (L_s, B_s) from B_0 = x; ``x`` and ``s`` may be per-path arrays.

    Skorokhod reflection: |B| = |x| + W + L with L = max(0, M - |x|), M the
    running maximum of -W. M given the endpoint w of -W is (w + sqrt(w^2 + 2sE)) / 2.
    The sign of B_s is that of x before the first visit of 0 and a fair coin after.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("s must be positive")
    if size is None:
        size = np.broadcast(x, s).shape or None
    gen = as_generator(rng)
    z = gen.standard_normal(size)
    e = gen.standard_exponential(size)
    heads = gen.random(size) < 0.5
    w = np.sqrt(s) * z
    running_max = 0.5 * (w + np.sqrt(w * w + 2.0 * s * e))
    ax = np.abs(x)
    local_time = np.maximum(running_max - ax, 0.0)
    radius = ax - w + local_time
    own_sign = np.where(x < 0, -1.0, 1.0)
    sign = np.where((local_time > 0) | (x == 0), np.where(heads, 1.0, -1.0), own_sign)
    endpoint = sign * radius
    if np.ndim(local_time) == 0:
        return float(local_time), float(endpoint)
    return local_time, endpoint


def _erfc_term(kappa: float, s: float, c):
    """(kappa / 2) exp(kappa^2 s / 2 - kappa c) Erfc(c / sqrt(2 s) - kappa sqrt(s / 2))."""
    c = np.asarray(c, dtype=float)
    return 0.5 * kappa * _exp_erfc(0.5 * kappa * kappa * s - kappa * c, c / math.sqrt(2.0 * s) - kappa * math.sqrt(s / 2.0))


def local_time_exp_weighted(kappa: float, s: float, x: float, h: Callable[[float], float], *, breakpoints: Sequence[float] = ()) -> float:
    """E_x[exp(kappa L_s) h(B_s)] for a bounded test function h, by quadrature in the endpoint."""
    if kappa < 0:
        raise DomainError("kappa must be nonnegative")
    if not s > 0:
        raise DomainError("s must be positive")
    ax = abs(x)

    def integrand(z: float) -> float:
        return h(z) * (float(_g1(s, z - x)) + float(_erfc_term(kappa, s, abs(z) + ax)))

    cuts = sorted({0.0, float(x), *map(float, breakpoints)})
    pieces = [(-np.inf, cuts[0]), *zip(cuts[:-1], cuts[1:]), (cuts[-1], np.inf)]
    total = 0.0
    for a, b in pieces:
        if a == b:
            continue
        value, err = integrate.quad(integrand, a, b, epsabs=1e-12, epsrel=1e-10, limit=200)
        if not math.isfinite(value):
            raise NumericError("endpoint quadrature failed", kappa=kappa, s=s, x=x, piece=(a, b))
        total += value
    return total


def local_time_exp_set(kappa: float, s: float, x: float, lo: float, hi: float) -> float:
    """E_x[exp(kappa L_s); lo < |B_s| < hi], closed first term plus one quadrature."""
    if kappa < 0:
        raise DomainError("kappa must be nonnegative")
    if not s > 0:
        raise DomainError("s must be positive")
    if not 0 <= lo < hi:
        raise DomainError("need 0 <= lo < hi")
    sd = math.sqrt(s)
    ndtr = special.ndtr
    hi_f = hi if math.isfinite(hi) else np.inf
    endpoint_mass = (ndtr((hi_f - x) / sd) - ndtr((lo - x) / sd)) + (ndtr((-lo - x) / sd) - ndtr((-hi_f - x) / sd))
    if kappa == 0:
        return float(endpoint_mass)
    ax = abs(x)
    weight, _ = integrate.quad(lambda z: float(_erfc_term(kappa, s, z + ax)), lo, hi_f, epsabs=1e-13, epsrel=1e-11, limit=200)
    return float(endpoint_mass) + 2.0 * weight


def local_time_exp_box(kappa: float, s: float, x: float) -> float:
    """E_x[exp(kappa L_s); |B_s| < 1] for |x| < 1."""
    if not abs(x) < 1:
        raise DomainError(f"start point must satisfy |x| < 1, got {x!r}")
    return local_time_exp_set(kappa, s, x, 0.0, 1.0)


def local_time_exp_box_lower(kappa: float, s: float) -> float:
    """kappa exp(kappa^2 s / 2 - 2 kappa) Erfc(sqrt(2 / s)), valid for every |x| < 1."""
    return kappa * float(_exp_erfc(0.5 * kappa * kappa * s - 2.0 * kappa, math.sqrt(2.0 / s)))


# --- arcsine law and meander ----------------------------------------------------


def last_zero_sample(t: float, rng: RngLike, size=None) -> float | np.ndarray:
    """Last zero before t of Brownian motion from 0: t sin^2(pi U / 2)."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    u = open_uniform(as_generator(rng), size)
    return _scalar_or_array(t * np.sin(0.5 * np.pi * u) ** 2, size)


def last_zero_cdf(v: ArrayLike, t: float) -> float | np.ndarray:
    v = np.clip(np.asarray(v, dtype=float) / t, 0.0, 1.0)
    out = 2.0 / np.pi * np.arcsin(np.sqrt(v))
    return float(out) if out.ndim == 0 else out


def meander_endpoint_sample(dur: float, rng: RngLike, size=None) -> float | np.ndarray:
    """Endpoint of a Brownian meander of duration ``dur`` (Rayleigh law)."""
    if not dur > 0:
        raise DomainError(f"duration must be positive, got {dur!r}")
    u = open_uniform(as_generator(rng), size)
    return _scalar_or_array(np.sqrt(-2.0 * dur * np.log(u)), size)


def meander_endpoint_cdf(y: ArrayLike, dur: float) -> float | np.ndarray:
    y = np.maximum(np.asarray(y, dtype=float), 0.0)
    out = -np.expm1(-y * y / (2.0 * dur))
    return float(out) if out.ndim == 0 else out


def last_zero_decomposition_sample(t: float, rng: RngLike, size=None):
    """(gamma_t, |beta_t|): last zero and the meander endpoint after it.

    The second component has the law of |B_t| for B started at 0.
    """
    gen = as_generator(rng)
    gamma = np.asarray(last_zero_sample(t, gen, size))
    remaining = np.maximum(t - gamma, np.finfo(float).tiny)
    u = open_uniform(gen, size)
    endpoint = np.sqrt(-2.0 * remaining * np.log(u))
    if size is None:
        return float(gamma), float(endpoint)
    return gamma, endpoint


# --- Hartman-Watson ----------------------------------------------------------


@dataclass(frozen=True)
class QuadResult:
    value: float
    abserr: float

    def __float__(self) -> float:
        return self.value


def _hw_cutoff(rho: float) -> float:
    return math.acosh(1.0 + HW_TRUNCATION / rho)


def _contour_cutoff(z: float) -> float:
    return math.sqrt(math.pi**2 / 4.0 + 80.0 * z) + 4.0 * z


def _pieces(upper: float, step: float) -> list[float]:
    edges = [k * step for k in range(int(upper / step) + 1)]
    if edges[-1] < upper:
        edges.append(upper)
    return edges


def _fsum_quad(f: Callable[[float], float], edges: list[float], tol: float) -> QuadResult:
    parts: list[float] = []
    errs: list[float] = []
    for a, b in zip(edges[:-1], edges[1:]):
        value, err = integrate.quad(f, a, b, epsabs=0.1 * tol / len(edges), epsrel=1e-13, limit=200)
        parts.append(value)
        errs.append(err)
    rounding = np.finfo(float).eps * math.fsum(abs(p) for p in parts)
    return QuadResult(math.fsum(parts), math.fsum(errs) + rounding)


def _hw_direct(rho: float, z: float, tol: float) -> QuadResult:
    shift = math.pi**2 / (2.0 * z)

    def f(y: float) -> float:
        return math.exp(shift - y * y / (2.0 * z) - rho * math.cosh(y)) * math.sinh(y) * math.sin(math.pi * y / z)

    # pieces end at the zeros k z of sin(pi y / z)
    return _fsum_quad(f, _pieces(_hw_cutoff(rho), z), tol)


def _hw_contour(rho: float, z: float, tol: float) -> QuadResult:
    # same integral along Im y = pi/2; the vertical leg is real and drops out
    shift = math.pi**2 / (8.0 * z)

    def f(u: float) -> float:
        return math.exp(shift - u * u / (2.0 * z)) * math.cosh(u) * math.cos(math.pi * u / (2.0 * z) - rho * math.sinh(u))

    return _fsum_quad(f, _pieces(_contour_cutoff(z), z), tol)


def _hw_contour_mp(rho: float, z: float) -> QuadResult:
    digits = 20 + int(math.ceil(math.pi**2 / (8.0 * z * math.log(10.0))))
    with mp.workdps(digits):
        zz = mp.mpf(z)
        rr = mp.mpf(rho)
        shift = mp.pi**2 / (8 * zz)

        def f(u):
            return mp.exp(shift - u * u / (2 * zz)) * mp.cosh(u) * mp.cos(mp.pi * u / (2 * zz) - rr * mp.sinh(u))

        points = [mp.mpf(e) for e in _pieces(_contour_cutoff(z), z)]
        value, err = mp.quad(f, points, error=True)
        return QuadResult(float(value), float(abs(err)))


@lru_cache(maxsize=4096)
def _hw_raw(rho: float, z: float, tol: float) -> QuadResult:
    if z >= HW_DIRECT_MIN_Z:
        result = _hw_direct(rho, z, tol)
    elif z >= HW_FLOAT_MIN_Z:
        result = _hw_contour(rho, z, tol)
    else:
        result = _hw_contour_mp(rho, z)
    scale = rho / math.sqrt(2.0 * math.pi**3 * z)
    return QuadResult(scale * result.value, scale * result.abserr)


def hartman_watson_theta(rho: float, z: float, tol: float = 1e-9) -> QuadResult:
    """theta_rho(z) = rho / sqrt(2 pi^3 z) int_0^inf exp((pi^2 - y^2)/2z - rho cosh y) sinh y sin(pi y / z) dy.

    Unnormalized: integrating exp(-mu^2 z / 2) theta_rho(z) over z gives I_mu(rho).
    The y-range stops where exp(-rho (cosh y - 1)) drops below 1e-16; pieces
    between consecutive zeros of sin(pi y / z) are summed exactly (fsum).

    The prefactor exp(pi^2 / 2z) cancels against the oscillation, so for small z
    the integral is taken along Im y = pi/2 instead, where the integrand becomes
    exp((pi^2/4 - u^2)/2z) cosh u cos(pi u / 2z - rho sinh u); below
    HW_FLOAT_MIN_Z even that needs extended precision (mpmath).
    """
    if not rho > 0 or not z > 0:
        raise DomainError(f"hartman_watson_theta needs rho > 0 and z > 0, got rho={rho!r}, z={z!r}")
    result = _hw_raw(float(rho), float(z), float(tol))
    if not result.abserr <= tol:
        raise NumericError("theta quadrature missed its tolerance", rho=rho, z=z, achieved=result.abserr, tol=tol)
    return result


def hw_large_z_limit(rho: float, z_start: float = 16.0, rel: float = 1e-5, z_max: float = 1e9) -> tuple[float, float]:
    """Double z until sqrt(2 pi z^3) theta_rho(z) settles; returns (z, value).

    The value tends to K_0(rho).
    """
    z = z_start
    previous = math.sqrt(2.0 * math.pi * z**3) * hartman_watson_theta(rho, z).value
    while z < z_max:
        z *= 2.0
        current = math.sqrt(2.0 * math.pi * z**3) * hartman_watson_theta(rho, z).value
        if abs(current - previous) <= rel * abs(current):
            return z, current
        previous = current
    raise NumericError("large-z limit did not settle", rho=rho, z=z, last=previous)


def _bessel_mu(delta: float) -> float:
    if not delta >= 2:
        raise DomainError(f"Bessel dimension must be >= 2, got {delta!r}")
    return delta / 2.0 - 1.0


def hw_joint_density(delta: float, r: float, t: float, z: float, xi: float, tol: float = 1e-9) -> float:
    """Density of (int_0^t ds / R_s^2, R_t) at (z, xi) for the delta-dimensional Bessel process from r."""
    mu = _bessel_mu(delta)
    if min(r, t, z, xi) <= 0:
        raise DomainError("hw_joint_density needs r, t, z, xi > 0")
    theta = hartman_watson_theta(r * xi / t, z, tol).value
    return (xi / r) ** mu * xi / t * math.exp(-0.5 * mu * mu * z - (r * r + xi * xi) / (2.0 * t)) * theta


def hw_z_marginal(delta: float, r: float, t: float, xi: float, tol: float = 1e-9) -> float:
    """int_0^inf hw_joint_density dz; equals ``bessel_transition_density``.

    The lower end is raised until theta is negligible there.
    """
    mu = _bessel_mu(delta)
    rho = r * xi / t

    def integrand(z: float) -> float:
        return math.exp(-0.5 * mu * mu * z) * hartman_watson_theta(rho, z, tol).value

    target = float(special.iv(mu, rho))
    z_lo = min(0.25, 0.25 / rho)
    while abs(integrand(z_lo)) * z_lo > 1e-10 * target and z_lo > 1e-3:
        z_lo *= 0.5
    pieces = [(z_lo, HW_DIRECT_MIN_Z), (HW_DIRECT_MIN_Z, 4.0), (4.0, np.inf)] if z_lo < HW_DIRECT_MIN_Z else [(z_lo, 4.0), (4.0, np.inf)]
    total = 0.0
    for a, b in pieces:
        if a >= b:
            continue
        value, err = integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-10, limit=200)
        if not math.isfinite(value):
            raise NumericError("z-marginal quadrature failed", piece=(a, b), err=err)
        total += value
    return (xi / r) ** mu * xi / t * math.exp(-(r * r + xi * xi) / (2.0 * t)) * total


# --- Bessel process transition --------------------------------------------------


def bessel_transition_density(delta: float, r: float, t: float, xi: ArrayLike) -> float | np.ndarray:
    """(xi/t) (xi/r)^mu exp(-(r^2 + xi^2)/2t) I_mu(r xi / t), mu = delta/2 - 1."""
    mu = _bessel_mu(delta)
    if not (r > 0 and t > 0):
        raise DomainError("bessel_transition_density needs r > 0 and t > 0")
    xi = np.asarray(xi, dtype=float)
    safe = np.where(xi > 0, xi, 1.0)
    out = safe / t * (safe / r) ** mu * np.exp(-np.square(r - safe) / (2.0 * t)) * special.ive(mu, r * safe / t)
    out = np.where(xi > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def bessel_transition_cdf(delta: float, r: float, t: float, y: ArrayLike, n_grid: int = 20001) -> float | np.ndarray:
    """Tabulated CDF of R_t (trapezoid on a fine grid, then linear interpolation)."""
    top = r + 12.0 * math.sqrt(t * max(delta, 1.0))
    grid = np.linspace(0.0, top, n_grid)
    cdf = integrate.cumulative_trapezoid(bessel_transition_density(delta, r, t, grid), grid, initial=0.0)
    out = np.interp(np.asarray(y, dtype=float), grid, cdf, right=1.0)
    return float(out) if out.ndim == 0 else out


def _q2(t: float, a: float, b: float) -> float:
    return b / t * math.exp(-((a - b) ** 2) / (2.0 * t)) * float(special.ive(0, a * b / t))


def divtrans_truncated(s: float, t: float, r: float, y: float, eps: float) -> float:
    """int_eps^inf rho^{-2} q_s(r, rho) q_{t-s}(rho, y) / q_t(r, y) d rho for the 2-dim Bessel process.

    Grows like ``divtrans_log_slope_limit`` * log(1/eps).
    """
    if not 0 < s < t:
        raise DomainError("need 0 < s < t")
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if min(r, y) <= 0:
        raise DomainError("r and y must be positive")
    norm = _q2(t, r, y)

    def f(rho: float) -> float:
        return _q2(s, r, rho) * _q2(t - s, rho, y) / (rho * rho * norm)

    near, _ = integrate.quad(lambda u: math.exp(u) * f(math.exp(u)), math.log(eps), 0.0, epsabs=1e-12, epsrel=1e-10, limit=200)
    far, _ = integrate.quad(f, 1.0, np.inf, epsabs=1e-12, epsrel=1e-10, limit=200)
    return near + far


def divtrans_log_slope_limit(s: float, t: float, r: float, y: float) -> float:
    return math.exp(-r * r / (2.0 * s)) * y * math.exp(-y * y / (2.0 * (t - s))) / (s * (t - s) * _q2(t, r, y))


def cauchy_kernel(t: float, x: ArrayLike) -> float | np.ndarray:
    """Density t / (pi (t^2 + x^2)) of the symmetric 1-stable law at time t."""
    x = np.asarray(x, dtype=float)
    out = t / (np.pi * (t * t + x * x))
    return float(out) if out.ndim == 0 else out


def condfr_truncated(s: float, t: float, x: float, y: float, eps: float) -> float:
    """int_{eps < |z| < 1} |z|^{-1} p_s(x, z) p_{t-s}(z, y) dz / p_t(x, y), Cauchy kernel in one dimension."""
    if not 0 < s < t:
        raise DomainError("need 0 < s < t")
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    norm = cauchy_kernel(t, y - x)

    def f(u: float) -> float:
        z = math.exp(u)
        right = cauchy_kernel(s, z - x) * cauchy_kernel(t - s, y - z)
        left = cauchy_kernel(s, -z - x) * cauchy_kernel(t - s, y + z)
        return (right + left) / norm

    value, _ = integrate.quad(f, math.log(eps), 0.0, epsabs=1e-13, epsrel=1e-11, limit=200)
    return value


def condfr_log_slope_limit(s: float, t: float, x: float, y: float) -> float:
    return 2.0 * cauchy_kernel(s, x) * cauchy_kernel(t - s, y) / cauchy_kernel(t, y - x)


def fit_log_slope(eps_values: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``values`` against log(1/eps)."""
    if len(eps_values) < 2:
        raise DomainError("need at least two eps values")
    slope, _ = np.polyfit(np.log(1.0 / np.asarray(eps_values, dtype=float)), np.asarray(values, dtype=float), 1)
    return float(slope)
