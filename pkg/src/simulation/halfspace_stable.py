"""Boundary Feynman-Kac functionals seen through 1-stable processes.

Time-changing a lateral Brownian motion W by the inverse running maximum of an
independent one-dimensional Brownian motion gives a Cauchy process; with a
drift m in the inner motion it gives the relativistic 1-stable process. The
Laplace transform in t of the boundary functional is then an ordinary
Feynman-Kac functional of that process, with terminal datum f_m.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate, interpolate, special, stats

from src.analysis.specfun import bessel_k_scaled
from src.sampling.batches import DEFAULT_BATCH_SIZE, run_batches
from src.sampling.estimate import EstimatePair, MCEstimate
from src.sampling.laws import hitting_time_sample, local_time_joint_sample
from src.sampling.rng import RngLike, RngStream, as_generator, open_uniform
from src.simulation.models import InitialDatum, PathGrid, PotentialSpec, as_point
from src.utils.errors import DomainError, NumericError
from src.utils.telemetry import traced

logger = logging.getLogger(__name__)

_FM_TABLE_POINTS = 256


def _g1(s, x):
    return np.exp(-np.square(x) / (2.0 * s)) / np.sqrt(2.0 * np.pi * s)


# --- time-change skeletons -----------------------------------------------------


@dataclass(frozen=True)
class TimeChangeSkeleton:
    """W(tau_a) sampled at levels a_0 = 0 < a_1 < ... < a_K.

    ``clock_values`` has shape (n, K+1), ``spatial_values`` (n, K+1, d).
    """

    levels: np.ndarray
    clock_values: np.ndarray
    spatial_values: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.clock_values, axis=1) <= 0):
            raise NumericError("time-change clock must be strictly increasing along each path")

    @property
    def endpoint(self) -> np.ndarray:
        return self.spatial_values[:, -1, :]

    def increments(self) -> np.ndarray:
        return np.diff(self.spatial_values, axis=1)


def cauchy_skeleton_sample(d: int, a_grid: ArrayLike, rng: RngLike, size: int = 1, x=None) -> TimeChangeSkeleton:
    """Cauchy process on ``a_grid`` as W(tau_a): independent first-passage clock increments, then Gaussian steps."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    levels = np.asarray(a_grid, dtype=float)
    if levels.ndim != 1 or levels.size == 0 or levels[0] != 0.0 or np.any(np.diff(levels) <= 0):
        raise DomainError("a_grid must start at 0 and increase strictly")
    gen = as_generator(rng)
    start = np.zeros(d) if x is None else as_point(x, d)
    steps = np.diff(levels)
    clock = np.zeros((size, levels.size))
    for k, step in enumerate(steps, start=1):
        clock[:, k] = clock[:, k - 1] + hitting_time_sample(step, gen, size)
    jumps = np.sqrt(np.diff(clock, axis=1))[:, :, None] * gen.standard_normal((size, steps.size, d))
    spatial = np.concatenate([np.broadcast_to(start, (size, 1, d)), start + np.cumsum(jumps, axis=1)], axis=1)
    return TimeChangeSkeleton(levels=levels, clock_values=clock, spatial_values=spatial)


def cauchy_cf(a: float, xi: ArrayLike) -> float | np.ndarray:
    out = np.exp(-a * np.abs(np.asarray(xi, dtype=float)))
    return float(out) if out.ndim == 0 else out


def relativistic_clock_sample(m: float, t_level: ArrayLike, rng: RngLike, size=None) -> float | np.ndarray:
    """First passage of B_s + m s to ``t_level``: inverse Gaussian, mean t/m, shape t^2.

    Two-root transformation: the smaller root x of the chi-square equation is
    kept with probability mean / (mean + x), otherwise mean^2 / x.
    """
    if not m > 0:
        raise DomainError(f"mass must be positive, got {m!r}")
    level = np.asarray(t_level, dtype=float)
    if np.any(level <= 0):
        raise DomainError("level must be positive")
    gen = as_generator(rng)
    if size is None:
        size = level.shape or None
    mean = level / m
    shape = level * level
    y = np.square(gen.standard_normal(size))
    ratio = mean * y / (2.0 * shape)
    # mean * (1 + r - sqrt(r (2 + r))) written without the cancellation
    root = mean / (1.0 + ratio + np.sqrt(ratio * (2.0 + ratio)))
    u = open_uniform(gen, size)
    draw = np.where(u <= mean / (mean + root), root, mean * mean / root)
    return float(draw) if np.ndim(draw) == 0 else draw


def relativistic_clock_laplace(m: float, t_level: float, lam: ArrayLike) -> float | np.ndarray:
    out = np.exp(-t_level * (np.sqrt(2.0 * np.asarray(lam, dtype=float) + m * m) - m))
    return float(out) if out.ndim == 0 else out


def relativistic_cf(m: float, t_level: float, xi: ArrayLike) -> float | np.ndarray:
    xi = np.abs(np.asarray(xi, dtype=float))
    out = np.exp(-t_level * (np.sqrt(xi * xi + m * m) - m))
    return float(out) if out.ndim == 0 else out


# --- f_0 and f_m ------------------------------------------------------------------


def _lateral_center(u0: InitialDatum, d: int) -> np.ndarray:
    return u0.center_in(d + 1)[:-1]


def _lateral_mass(u0: InitialDatum, t: float, x: np.ndarray) -> float:
    """int g_{d}(t, z - x) u0_lateral(z) dz, the lateral factor of a separable datum."""
    d = x.size
    if u0.kind == "constant_one":
        return 1.0
    offset = float(np.sum(np.square(x - _lateral_center(u0, d))))
    if u0.kind == "gaussian_bump":
        spread = u0.radius**2 + t
        return (u0.radius**2 / spread) ** (d / 2.0) * math.exp(-offset / (2.0 * spread))
    level = u0.radius**2 / t
    if offset == 0.0:
        return float(stats.chi2.cdf(level, d))
    return float(stats.ncx2.cdf(level, d, offset / t))


def _normal_profile(u0: InitialDatum, d: int, r: ArrayLike) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if u0.kind == "constant_one":
        return np.full_like(r, u0.amplitude)
    if u0.kind == "gaussian_bump":
        center = u0.center_in(d + 1)[-1]
        return u0.amplitude * np.exp(-np.square(r - center) / (2.0 * u0.radius**2))
    lo, hi = u0.interval if u0.interval is not None else (0.0, math.inf)
    return np.where((r > lo) & (r < hi), u0.amplitude, 0.0)


def _normal_factor(u0: InitialDatum, d: int, t: float) -> float:
    """int (|y|/t) g_1(t, y) u0_normal(|y|) dy."""
    if u0.kind == "constant_one":
        return u0.amplitude * math.sqrt(2.0 / (math.pi * t))
    if u0.kind == "box_indicator":
        lo, hi = u0.interval if u0.interval is not None else (0.0, math.inf)
        upper = 0.0 if math.isinf(hi) else float(_g1(t, hi))
        return 2.0 * u0.amplitude * (float(_g1(t, lo)) - upper)
    c = u0.center_in(d + 1)[-1]
    R2 = u0.radius**2
    var = t * R2 / (t + R2)
    mid = c * var / R2
    head = var * math.exp(-mid * mid / (2.0 * var)) + mid * math.sqrt(2.0 * math.pi * var) * float(special.ndtr(mid / math.sqrt(var)))
    return 2.0 * u0.amplitude * math.exp(-c * c / (2.0 * (R2 + t))) * head / (t * math.sqrt(2.0 * math.pi * t))


def f0_kernel(t: float, x, u0: InitialDatum) -> float:
    """int g_{N-1}(t, z - x) int (|y|/t) g_1(t, y) u0(z, |y|) dy dz for lateral x in R^{N-1}."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    point = np.atleast_1d(np.asarray(x, dtype=float))
    return _lateral_mass(u0, t, point) * _normal_factor(u0, point.size, t)


def fm_kernel(m: float, x, u0: InitialDatum, rtol: float = 1e-6) -> float:
    """int_0^inf exp(-m^2 t / 2) f0(t, x) dt, integrated in s = sqrt(t)."""
    if not m > 0:
        raise DomainError(f"m must be positive, got {m!r}")
    point = np.atleast_1d(np.asarray(x, dtype=float))

    def integrand(s: float) -> float:
        t = s * s
        return 2.0 * s * math.exp(-0.5 * m * m * t) * f0_kernel(t, point, u0)

    value, err = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=rtol, limit=400)
    if not math.isfinite(value) or err > max(rtol * abs(value), 1e-15):
        raise NumericError("f_m quadrature missed its tolerance", m=m, value=value, err=err)
    return value


@dataclass(frozen=True)
class RadialTable:
    """f_m as a function of the lateral distance to the datum's centre; zero beyond ``r_max``."""

    center: np.ndarray
    spline: interpolate.CubicSpline | None
    r_max: float
    constant: float = 0.0

    def __call__(self, points: np.ndarray) -> np.ndarray:
        if self.spline is None:
            return np.full(points.shape[0], self.constant)
        r = np.sqrt(np.sum(np.square(points - self.center), axis=1))
        return np.where(r <= self.r_max, self.spline(np.minimum(r, self.r_max)), 0.0)


def fm_table(m: float, d: int, u0: InitialDatum, points: int = _FM_TABLE_POINTS) -> RadialTable:
    center = _lateral_center(u0, d)
    if u0.kind == "constant_one":
        return RadialTable(center=center, spline=None, r_max=math.inf, constant=2.0 * u0.amplitude / m)
    r_max = u0.radius * (8.0 if u0.kind == "gaussian_bump" else 1.0) + 30.0 / m
    radii = np.linspace(0.0, r_max, points)
    unit = np.zeros(d)
    unit[0] = 1.0
    values = np.array([fm_kernel(m, center + r * unit, u0) for r in radii])
    return RadialTable(center=center, spline=interpolate.CubicSpline(radii, values), r_max=r_max)


# --- the Laplace-transform identity ----------------------------------------------------


def _prelat_lhs_kernel(gen, n, *, m, pot, u0, x, n_steps):
    horizon = gen.exponential(2.0 / (m * m), n)
    h = horizon / n_steps
    lateral = np.tile(x, (n, 1))
    normal = np.zeros(n)
    integral = np.zeros(n)
    value = pot.evaluate(np.sqrt(np.sum(np.square(lateral), axis=1)))
    for _ in range(n_steps):
        local_time, endpoint = local_time_joint_sample(normal, h, gen)
        normal = np.abs(endpoint)
        lateral = lateral + np.sqrt(h)[:, None] * gen.standard_normal(lateral.shape)
        following = pot.evaluate(np.sqrt(np.sum(np.square(lateral), axis=1)))
        # trapezoid in the lateral position; exact when V is constant
        integral += 0.5 * (value + following) * local_time
        value = following
    return 2.0 / (m * m) * u0.evaluate_halfspace(lateral, normal) * np.exp(integral)


def _prelat_rhs_kernel(gen, n, *, m, pot, table, x, n_steps):
    horizon = gen.exponential(1.0 / m, n)
    h = horizon / n_steps
    pos = np.tile(x, (n, 1))
    integral = np.zeros(n)
    value = pot.evaluate(np.sqrt(np.sum(np.square(pos), axis=1)))
    for _ in range(n_steps):
        clock = relativistic_clock_sample(m, h, gen)
        pos = pos + np.sqrt(clock)[:, None] * gen.standard_normal(pos.shape)
        following = pot.evaluate(np.sqrt(np.sum(np.square(pos), axis=1)))
        integral += 0.5 * h * (value + following)
        value = following
    return table(pos) / m * np.exp(integral)


def prelat_identity_check(
    m: float,
    x,
    pot: PotentialSpec,
    u0: InitialDatum,
    grid: PathGrid,
    rng: RngStream,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> EstimatePair:
    """Both sides of u_m(x) = int e^{-mt} E_x[f_m(X_t) exp(int_0^t V(X_s) ds)] dt.

    lhs: t ~ Exp(m^2/2), weight 2/m^2, one boundary path from (x, 0).
    rhs: t ~ Exp(m), weight 1/m, one relativistic path with ``grid.steps()`` level steps.
    """
    if not m > 0:
        raise DomainError(f"m must be positive, got {m!r}")
    pot.require_flavor("boundary", "prelat_identity_check")
    if not pot.bounded:
        raise DomainError("prelat_identity_check needs a bounded potential (set a cap or a shift)")
    point = np.atleast_1d(np.asarray(x, dtype=float))
    n_steps, _ = grid.steps()
    with traced("prelat_identity_check", m=m, c=pot.c, n_paths=grid.n_paths):
        table = fm_table(m, point.size, u0)
        lhs_kernel = partial(_prelat_lhs_kernel, m=m, pot=pot, u0=u0, x=point, n_steps=n_steps)
        rhs_kernel = partial(_prelat_rhs_kernel, m=m, pot=pot, table=table, x=point, n_steps=n_steps)
        lhs = run_batches(lhs_kernel, grid.n_paths, rng.derive(0), batch_size=batch_size, workers=workers, label="prelat_lhs")
        rhs = run_batches(rhs_kernel, grid.n_paths, rng.derive(1), batch_size=batch_size, workers=workers, label="prelat_rhs")
    pair = EstimatePair(lhs.estimate, rhs.estimate)
    logger.info("laplace identity m=%g c=%g: lhs=%.6g rhs=%.6g z=%.2f", m, pot.c, pair.lhs.mean, pair.rhs.mean, pair.z)
    return pair


# --- absorbed motion and the Phi_N kernel ----------------------------------------------


def absorbed_density(t: float, x_N: float, r: ArrayLike) -> float | np.ndarray:
    """g_1(t, r - x_N) - g_1(t, r + x_N), density of B_t on {sigma_0 > t}."""
    if not (t > 0 and x_N > 0):
        raise DomainError("absorbed_density needs t > 0 and x_N > 0")
    r = np.asarray(r, dtype=float)
    # same as g_1(t, r - x_N) (1 - exp(-2 r x_N / t))
    out = np.where(r > 0, _g1(t, r - x_N) * -np.expm1(-2.0 * r * x_N / t), 0.0)
    return float(out) if out.ndim == 0 else out


def absorbed_survival(t: float, x_N: float) -> float:
    """P_{x_N}(sigma_0 > t) = erf(x_N / sqrt(2t))."""
    return math.erf(x_N / math.sqrt(2.0 * t))


def _decomp_direct_kernel(gen, n, *, u0, x, t):
    d = x.size - 1
    lateral = x[:-1] + math.sqrt(t) * gen.standard_normal((n, d))
    normal = x[-1] + math.sqrt(t) * gen.standard_normal(n)
    survive = np.where(normal > 0, -np.expm1(-2.0 * x[-1] * np.maximum(normal, 0.0) / t), 0.0)
    return u0.evaluate_halfspace(lateral, np.abs(normal)) * survive


@dataclass(frozen=True)
class DecompCheck:
    direct: MCEstimate
    formula: float
    passed: bool

    def to_dict(self) -> dict:
        return {"direct": self.direct.to_dict(), "formula": self.formula, "passed": self.passed}


def decomp_formula(t: float, x, u0: InitialDatum) -> float:
    """int dz int_0^inf dr u0(z, r) int_{|r-x_N|}^{r+x_N} (2 pi t)^{-N/2} (eta/t) exp(-(|z-x'|^2 + eta^2)/2t) d eta."""
    point = np.atleast_1d(np.asarray(x, dtype=float))
    d = point.size - 1
    x_N = float(point[-1])
    lateral = _lateral_mass(u0, t, point[:-1])

    def inner(eta: float, r: float) -> float:
        return eta / t * math.exp(-eta * eta / (2.0 * t)) / math.sqrt(2.0 * math.pi * t) * float(_normal_profile(u0, d, r))

    if u0.kind == "box_indicator" and u0.interval is not None:
        lo, hi = u0.interval
        hi = min(hi, x_N + 14.0 * math.sqrt(t))
    else:
        lo, hi = 0.0, x_N + 14.0 * math.sqrt(t)
    if lo >= hi:
        return 0.0
    value, err = integrate.dblquad(inner, lo, hi, lambda r: abs(r - x_N), lambda r: r + x_N, epsabs=1e-13, epsrel=1e-10)
    if not math.isfinite(value):
        raise NumericError("decomposition quadrature failed", t=t, err=err)
    return lateral * value


def decomp_second_term_check(
    t: float,
    x,
    u0: InitialDatum,
    rng: RngStream,
    n_paths: int = 200_000,
    *,
    n_sigma: float = 3.0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> DecompCheck:
    """E_x[u0(B'_t, |B^N_t|); sigma_0 > t] by Monte Carlo against the absorbed-density formula.

    The Monte Carlo side weights each endpoint by its no-hit probability
    1 - exp(-2 x_N z / t) instead of simulating the path.
    """
    point = np.atleast_1d(np.asarray(x, dtype=float))
    if point.size < 2 or not point[-1] > 0:
        raise DomainError("decomp_second_term_check needs an interior point with x_N > 0 and N >= 2")
    if not t > 0:
        raise DomainError("t must be positive")
    kernel = partial(_decomp_direct_kernel, u0=u0, x=point, t=float(t))
    direct = run_batches(kernel, n_paths, rng, batch_size=batch_size, workers=workers, label="decomp_direct").estimate
    formula = decomp_formula(t, point, u0)
    return DecompCheck(direct=direct, formula=formula, passed=direct.agrees_with(formula, n_sigma))


def phi_kernel(N: int, y: ArrayLike) -> float | np.ndarray:
    """2 (2 pi y)^{-N/2} K_{N/2}(y)."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("phi_kernel needs y > 0")
    out = 2.0 * (2.0 * np.pi * y) ** (-N / 2.0) * bessel_k_scaled(N / 2.0, y) * np.exp(-y)
    return float(out) if np.ndim(out) == 0 else out


def laplace_identity(N: int, m: float, a: float) -> tuple[float, float]:
    """(quadrature, closed form) of int_0^inf t^{-N/2-1} exp(-m^2 t/2 - a^2/2t) dt = 2 (m/a)^{N/2} K_{N/2}(a m)."""
    if not (m > 0 and a > 0):
        raise DomainError("laplace_identity needs m > 0 and a > 0")

    def integrand(u: float) -> float:
        return math.exp(-0.5 * N * u - 0.5 * m * m * math.exp(u) - 0.5 * a * a * math.exp(-u))

    centre = math.log(a / m)
    value = 0.0
    for lo, hi in ((-np.inf, centre), (centre, np.inf)):
        piece, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
        value += piece
    closed = 2.0 * (m / a) ** (N / 2.0) * float(bessel_k_scaled(N / 2.0, a * m)) * math.exp(-a * m)
    return value, closed
