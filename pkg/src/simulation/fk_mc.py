"""Monte Carlo Feynman-Kac estimators with capped singular potentials.

Every estimator builds a picklable path kernel ``kernel(generator, n)`` and
hands it to ``run_batches``; kernels return one weight column per cap level so
a sweep over caps reuses the same paths (common random numbers).

Settings:
    fullspace   E_x[u0(B_t) exp(int_0^t V_m(B_s) ds)]            trapezoid (Simpson with bridge midpoints)
    stable      E_x[u0(X_t) exp(int_0^t V_m(X_s) ds)]            X_s = x + W(2 T_s), left endpoint
    halfspace   E_x[u0(B'_t, |B^N_t|) exp(int V_m(B'_s, 0) dL_s)]  exact (dL, |B^N|) per step
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Literal, Sequence

import numpy as np
from scipy import integrate, optimize, special, stats

from src.analysis.confinement import confine_prob
from src.analysis.specfun import bessel_j_zero, gamma_fn, sphere_area
from src.analysis.thresholds import ThresholdPosition, hardy_constant, threshold_position
from src.sampling.batches import DEFAULT_BATCH_SIZE, run_batches
from src.sampling.estimate import EstimatePair, MCEstimate
from src.sampling.laws import local_time_exp_weighted, local_time_joint_sample, subordinator_sample
from src.sampling.rng import RngLike, RngStream, as_generator
from src.simulation.models import ExperimentGeometry, InitialDatum, PathGrid, PotentialSpec, as_point
from src.utils.errors import DomainError, NumericError
from src.utils.telemetry import traced

logger = logging.getLogger(__name__)

Setting = Literal["fullspace", "stable", "halfspace"]

_LEGENDRE_NODES = 48


def _check_dim(N: int, minimum: int = 1) -> int:
    if int(N) != N or N < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {N!r}")
    return int(N)


def _radius(points: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->i", points, points))


def _capped(raw: np.ndarray, caps: np.ndarray) -> np.ndarray:
    return np.minimum(raw[:, None], caps[None, :])


# --- path kernels (module level so worker processes can unpickle them) ------


def _fullspace_kernel(gen, n, *, pot, caps, u0, x, n_steps, h, bridge):
    dim = x.size
    pos = np.tile(x, (n, 1))
    raw_prev = pot.raw(_radius(pos))
    integral = np.zeros((n, caps.size))
    for _ in range(n_steps):
        new = pos + math.sqrt(h) * gen.standard_normal((n, dim))
        raw_new = pot.raw(_radius(new))
        if bridge:
            mid = 0.5 * (pos + new) + math.sqrt(0.25 * h) * gen.standard_normal((n, dim))
            raw_mid = pot.raw(_radius(mid))
            integral += h / 6.0 * (_capped(raw_prev, caps) + 4.0 * _capped(raw_mid, caps) + _capped(raw_new, caps))
        else:
            integral += 0.5 * h * (_capped(raw_prev, caps) + _capped(raw_new, caps))
        pos, raw_prev = new, raw_new
    return u0.evaluate(pos)[:, None] * np.exp(integral)


def _stable_kernel(gen, n, *, alpha, pot, caps, u0, x, n_steps, h):
    dim = x.size
    pos = np.tile(x, (n, 1))
    integral = np.zeros((n, caps.size))
    for _ in range(n_steps):
        integral += h * _capped(pot.raw(_radius(pos)), caps)
        clock = subordinator_sample(alpha, h, gen, n)
        pos = pos + np.sqrt(2.0 * clock)[:, None] * gen.standard_normal((n, dim))
    return u0.evaluate(pos)[:, None] * np.exp(integral)


def _halfspace_kernel(gen, n, *, pot, caps, u0, x, n_steps, h):
    lateral = np.tile(x[:-1], (n, 1))
    normal = np.full(n, x[-1])
    integral = np.zeros((n, caps.size))
    for _ in range(n_steps):
        boundary_value = _capped(pot.raw(_radius(lateral)), caps)
        local_time, endpoint = local_time_joint_sample(normal, h, gen)
        integral += boundary_value * local_time[:, None]
        normal = np.abs(endpoint)
        lateral = lateral + math.sqrt(h) * gen.standard_normal(lateral.shape)
    return u0.evaluate_halfspace(lateral, normal)[:, None] * np.exp(integral)


def _bessel_rhs_kernel(gen, n, *, dim, pot, f, r0, n_steps, h, bridge):
    """2-dimensional Bessel paths reweighted to dimension ``dim``."""
    mu = dim / 2.0 - 1.0
    hardy = hardy_constant(dim)
    pos = np.tile(np.array([r0, 0.0]), (n, 1))

    def terms(points):
        r = _radius(points)
        with np.errstate(divide="ignore"):
            inverse_square = 1.0 / np.square(r)
        return pot.evaluate(r), inverse_square

    capped_prev, inv_prev = terms(pos)
    capped_int = np.zeros(n)
    inverse_int = np.zeros(n)
    for _ in range(n_steps):
        new = pos + math.sqrt(h) * gen.standard_normal((n, 2))
        capped_new, inv_new = terms(new)
        if bridge:
            mid = 0.5 * (pos + new) + math.sqrt(0.25 * h) * gen.standard_normal((n, 2))
            capped_mid, inv_mid = terms(mid)
            capped_int += h / 6.0 * (capped_prev + 4.0 * capped_mid + capped_new)
            inverse_int += h / 6.0 * (inv_prev + 4.0 * inv_mid + inv_new)
        else:
            capped_int += 0.5 * h * (capped_prev + capped_new)
            inverse_int += 0.5 * h * (inv_prev + inv_new)
        pos, capped_prev, inv_prev = new, capped_new, inv_new
    radius = _radius(pos)
    return f.radial(radius) * (radius / r0) ** mu * np.exp(capped_int - hardy * inverse_int)


def _confinement_kernel(gen, n, *, dim, rho, n_steps, h):
    pos = np.zeros((n, dim))
    pos[:, 0] = rho
    alive = np.ones(n, dtype=bool)
    gap_prev = np.full(n, 1.0 - rho)
    for _ in range(n_steps):
        pos = pos + math.sqrt(h) * gen.standard_normal((n, dim))
        gap = 1.0 - _radius(pos)
        # bridge crossing of the tangent plane between two inside points
        crossing = np.exp(-2.0 * np.maximum(gap_prev, 0.0) * np.maximum(gap, 0.0) / h)
        alive &= (gap > 0.0) & (gen.random(n) >= crossing)
        gap_prev = gap
    return alive.astype(float)


def _sweep_kernel(gen, n, *, inner):
    weights = inner(gen, n)
    return np.hstack([weights, np.diff(weights, axis=1)])


# --- estimators -----------------------------------------------------------------


def fk_fullspace(
    N: int,
    pot: PotentialSpec,
    u0: InitialDatum,
    t: float,
    x,
    grid: PathGrid,
    rng: RngStream,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> MCEstimate:
    N = _check_dim(N)
    pot.require_flavor("bulk", "fk_fullspace")
    pot.require_cap("fk_fullspace")
    n_steps, h = grid.steps(t)
    kernel = partial(
        _fullspace_kernel, pot=pot, caps=np.asarray([pot.cap]), u0=u0, x=as_point(x, N), n_steps=n_steps, h=h, bridge=grid.bridge_correction
    )
    return run_batches(kernel, grid.n_paths, rng, batch_size=batch_size, workers=workers, label="fk_fullspace").estimate


def fk_stable(
    N: int,
    alpha: float,
    pot: PotentialSpec,
    u0: InitialDatum,
    t: float,
    x,
    grid: PathGrid,
    rng: RngStream,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> MCEstimate:
    N = _check_dim(N)
    if not 0 < alpha < 2:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha!r}")
    pot.require_cap("fk_stable")
    n_steps, h = grid.steps(t)
    kernel = partial(_stable_kernel, alpha=alpha, pot=pot, caps=np.asarray([pot.cap]), u0=u0, x=as_point(x, N), n_steps=n_steps, h=h)
    return run_batches(kernel, grid.n_paths, rng, batch_size=batch_size, workers=workers, label="fk_stable").estimate


def stable_endpoint_sample(N: int, alpha: float, t: float, x, rng: RngLike, size: int) -> np.ndarray:
    """Exact draws of X_t = x + W(2 T_t), shape (size, N)."""
    N = _check_dim(N)
    gen = as_generator(rng)
    clock = subordinator_sample(alpha, t, gen, size)
    return as_point(x, N) + np.sqrt(2.0 * clock)[:, None] * gen.standard_normal((size, N))


def fk_halfspace(
    N: int,
    pot: PotentialSpec,
    u0: InitialDatum,
    t: float,
    x,
    grid: PathGrid,
    rng: RngStream,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> MCEstimate:
    N = _check_dim(N, 2)
    pot.require_flavor("boundary", "fk_halfspace")
    pot.require_cap("fk_halfspace")
    point = as_point(x, N)
    if point[-1] < 0:
        raise DomainError(f"start point must lie in the closed half-space x_N >= 0, got x_N={point[-1]!r}")
    n_steps, h = grid.steps(t)
    kernel = partial(_halfspace_kernel, pot=pot, caps=np.asarray([pot.cap]), u0=u0, x=point, n_steps=n_steps, h=h)
    return run_batches(kernel, grid.n_paths, rng, batch_size=batch_size, workers=workers, label="fk_halfspace").estimate


def bessel_exponent_coefficient(N: int, c: float) -> float:
    """Coefficient c - C_N of int ds / R_s^2 on the uncapped part of the 2-dimensional side."""
    return c - hardy_constant(N)


def fk_radial_bessel(
    N: int,
    c: float,
    cap: float,
    f: InitialDatum,
    t: float,
    r0: float,
    grid: PathGrid,
    rng: RngStream,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> EstimatePair:
    """Whole-space estimate against its 2-dimensional Bessel-path rewrite.

    lhs = E_x[f(|B_t|) exp(int min(cap, c/|B_s|^2) ds)] with |x| = r0;
    rhs = E^(2)_r0[f(R_t) (R_t/r0)^{N/2-1} exp(int min(cap, c/R_s^2) ds - C_N int ds/R_s^2)].
    """
    N = _check_dim(N, 3)
    if not r0 > 0:
        raise DomainError("fk_radial_bessel needs a start point away from the origin (r0 > 0)")
    if c < 0 or not cap > 0:
        raise DomainError("need c >= 0 and cap > 0")
    if not f.is_radial:
        raise DomainError("fk_radial_bessel needs a radial initial datum")
    pot = PotentialSpec(c=c, beta=2.0, cap=cap)
    n_steps, h = grid.steps(t)
    with traced("fk_radial_bessel", N=N, c=c, cap=cap, t=t, r0=r0):
        lhs_kernel = partial(
            _fullspace_kernel, pot=pot, caps=np.asarray([cap]), u0=f, x=as_point(r0, N), n_steps=n_steps, h=h, bridge=grid.bridge_correction
        )
        rhs_kernel = partial(_bessel_rhs_kernel, dim=N, pot=pot, f=f, r0=r0, n_steps=n_steps, h=h, bridge=grid.bridge_correction)
        lhs = run_batches(lhs_kernel, grid.n_paths, rng.derive(0), batch_size=batch_size, workers=workers, label="bessel_lhs")
        rhs = run_batches(rhs_kernel, grid.n_paths, rng.derive(1), batch_size=batch_size, workers=workers, label="bessel_rhs")
    pair = EstimatePair(lhs.estimate, rhs.estimate)
    logger.info("bessel identity N=%d c=%g: lhs=%.6g rhs=%.6g z=%.2f", N, c, pair.lhs.mean, pair.rhs.mean, pair.z)
    return pair


def confinement_mc(
    N: int,
    rho: float,
    T: float,
    n_paths: int,
    n_steps: int,
    rng: RngStream,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> MCEstimate:
    """Bridge-corrected random-walk estimate of P(max_{s<=T} |B_s| < 1) from |B_0| = rho."""
    N = _check_dim(N)
    if not 0 <= rho < 1:
        raise DomainError(f"rho must lie in [0, 1), got {rho!r}")
    if not T > 0 or n_steps < 1:
        raise DomainError("need T > 0 and n_steps >= 1")
    kernel = partial(_confinement_kernel, dim=N, rho=float(rho), n_steps=int(n_steps), h=T / n_steps)
    return run_batches(kernel, n_paths, rng, batch_size=batch_size, workers=workers, label="confinement_mc").estimate


# --- event probabilities ----------------------------------------------------------


def _sphere_mean_gauss(N: int, s: float, r: np.ndarray, distance: float) -> np.ndarray:
    """Mean of g_N(s, r w - x) over unit vectors w, with |x| = distance."""
    r = np.asarray(r, dtype=float)
    norm = (2.0 * math.pi * s) ** (-N / 2.0)
    kappa = r * distance / s
    if distance == 0.0:
        return norm * np.exp(-np.square(r) / (2.0 * s))
    nu = N / 2.0 - 1.0
    safe = np.maximum(kappa, 1e-300)
    bessel_factor = gamma_fn(N / 2.0) * (2.0 / safe) ** nu * special.ive(nu, safe)
    # Gamma(N/2) (2/kappa)^nu I_nu(kappa) -> 1 as kappa -> 0
    bessel_factor = np.where(kappa < 1e-12, np.exp(-kappa), bessel_factor)
    return norm * np.exp(-np.square(r - distance) / (2.0 * s)) * bessel_factor


def _disc_mass(N: int, s: float, geo: ExperimentGeometry) -> float:
    """P_0(B_s in D)."""
    offset = float(np.sum(np.square(geo.disc_center_in(N))))
    level = geo.disc_radius**2 / s
    if offset == 0.0:
        return float(stats.chi2.cdf(level, N))
    return float(stats.ncx2.cdf(level, N, offset / s))


def event_probability(N: int, geo: ExperimentGeometry, t: float, x, n: int) -> float:
    """P_x(max_{at<=s<=(1-a)t} |B_s| < 1/n, B_t in D), splitting at a t and (1-a) t.

    The disc factor is taken from the centre of the small ball, which is exact
    in the limit of large n.
    """
    N = _check_dim(N)
    point = as_point(x, N)
    distance = float(np.linalg.norm(point))
    s = geo.a * t
    nodes, weights = np.polynomial.legendre.leggauss(_LEGENDRE_NODES)
    xi = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    horizon = n * n * geo.gamma * t
    confined = np.array([confine_prob(N, float(v), horizon).value for v in xi])
    density = _sphere_mean_gauss(N, s, xi / n, distance)
    radial = float(np.sum(w * xi ** (N - 1) * density * confined))
    return sphere_area(N) * n ** (-N) * radial * _disc_mass(N, s, geo)


@dataclass(frozen=True)
class EventRateFit:
    N: int
    rate: float
    reference: float
    n_values: tuple[int, ...]
    log_probs: tuple[float, ...]
    gamma: float
    t: float

    def __float__(self) -> float:
        return self.rate

    @property
    def relative_error(self) -> float:
        return abs(self.rate - self.reference) / self.reference

    def divergence_coefficient(self, c: float) -> float:
        """n^2 coefficient of log eps0 + c n^2 gamma t + log P_x(A_n) for V = c / r^2."""
        return (c - self.rate) * self.gamma * self.t

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "rate": self.rate,
            "reference": self.reference,
            "relative_error": self.relative_error,
            "n_values": list(self.n_values),
            "log_probs": list(self.log_probs),
        }


def event_rate_probe(N: int, geo: ExperimentGeometry, t: float, x, n_list: Sequence[int]) -> EventRateFit:
    """Fit s in log P_x(A_n) ~ const - N log n - s n^2 gamma t."""
    N = _check_dim(N)
    n_values = tuple(int(n) for n in n_list)
    if len(n_values) < 3:
        raise DomainError("event_rate_probe needs at least three values of n")
    if not t > 0:
        raise DomainError("t must be positive")
    with traced("event_rate_probe", N=N, t=t, n_list=n_values):
        probs = np.array([event_probability(N, geo, t, x, n) for n in n_values])
    if not np.all(np.isfinite(probs)) or np.any(probs <= 0):
        raise NumericError("event probability quadrature failed", N=N, probs=probs.tolist())
    n_arr = np.asarray(n_values, dtype=float)
    log_probs = np.log(probs)
    slope, _ = np.polyfit(n_arr**2 * geo.gamma * t, log_probs + N * np.log(n_arr), 1)
    reference = 0.5 * bessel_j_zero((N - 2) / 2.0, 1) ** 2
    fit = EventRateFit(
        N=N, rate=float(-slope), reference=reference, n_values=n_values, log_probs=tuple(log_probs.tolist()), gamma=geo.gamma, t=t
    )
    logger.info("event rate N=%d: s=%.6g reference=%.6g", N, fit.rate, reference)
    return fit


def _interval_hit(lo: float, hi: float, s: float, z):
    """P_z(lo < |B_s| < hi)."""
    z = np.asarray(z, dtype=float)
    sd = math.sqrt(s)
    ndtr = special.ndtr
    return ndtr((hi - z) / sd) - ndtr((lo - z) / sd) + ndtr((-lo - z) / sd) - ndtr((-hi - z) / sd)


@dataclass(frozen=True)
class BoundaryProbe:
    value: float
    bound: float
    c1: float
    c2: float

    @property
    def margin(self) -> float:
        return self.value - self.bound

    def to_dict(self) -> dict:
        return {"value": self.value, "bound": self.bound, "c1": self.c1, "c2": self.c2, "margin": self.margin}


def boundary_In_probe(nu_val: float, t: float, x_N: float, geo: ExperimentGeometry) -> BoundaryProbe:
    """E_{x_N}[exp(nu (L_{(1-a)t} - L_{at})); |B_t| in J] against its lower bound.

    bound = c1 c2 nu exp(nu^2 gamma t / 2 - 2 nu) with
    c1 = inf_{|z|<=1} P_z(|B_{at}| in J) and c2 = Erfc(sqrt(2 / gamma t)) int_{-1}^{1} g_1(at, x - x_N) dx.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if nu_val < 0:
        raise DomainError("nu must be nonnegative")
    lo, hi = geo.interval
    head = geo.a * t
    middle = geo.gamma * t
    sd = math.sqrt(head)

    def h_J(z: float) -> float:
        return float(_interval_hit(lo, hi, head, z))

    def outer(x: float) -> float:
        weight = math.exp(-((x - x_N) ** 2) / (2.0 * head)) / math.sqrt(2.0 * math.pi * head)
        if weight == 0.0:
            return 0.0
        return weight * local_time_exp_weighted(nu_val, middle, x, h_J, breakpoints=(-hi, -lo, lo, hi))

    value = 0.0
    for a, b in ((-np.inf, 0.0), (0.0, np.inf)):
        piece, err = integrate.quad(outer, a, b, epsabs=1e-12, epsrel=1e-9, limit=200)
        if not math.isfinite(piece):
            raise NumericError("I_n quadrature failed", nu=nu_val, t=t, x_N=x_N, err=err)
        value += piece

    grid = np.linspace(0.0, 1.0, 401)
    c1 = float(np.min(_interval_hit(lo, hi, head, grid)))
    refined = optimize.minimize_scalar(h_J, bounds=(0.0, 1.0), method="bounded")
    c1 = min(c1, float(refined.fun))
    box_mass = float(special.ndtr((1.0 - x_N) / sd) - special.ndtr((-1.0 - x_N) / sd))
    c2 = float(special.erfc(math.sqrt(2.0 / middle))) * box_mass
    bound = c1 * c2 * nu_val * float(np.exp(0.5 * nu_val * nu_val * middle - 2.0 * nu_val))
    return BoundaryProbe(value=value, bound=bound, c1=c1, c2=c2)


# --- threshold sweeps ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    c: float
    caps: tuple[float, ...]
    estimates: tuple[MCEstimate, ...]
    ratios: tuple[float, ...]
    last_increment: MCEstimate
    verdict: Literal["plateau", "growing", "inconclusive"]
    position: ThresholdPosition | None = None

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "caps": list(self.caps),
            "values": [e.to_dict() for e in self.estimates],
            "ratios": list(self.ratios),
            "last_increment": self.last_increment.to_dict(),
            "verdict": self.verdict,
            "zone": None if self.position is None else self.position.zone,
        }


@dataclass(frozen=True)
class SweepReport:
    setting: str
    N: int
    rows: tuple[SweepRow, ...]
    monotone_violations: int
    plateau_cutoff: float
    notes: tuple[str, ...] = field(default=("verdicts describe trends over the listed caps, not limits",))

    CSV_HEADER = ("c", "m", "mean", "std_err", "ratio_to_previous", "verdict")

    def csv_rows(self) -> list[tuple]:
        out = []
        for row in self.rows:
            for k, (m, estimate) in enumerate(zip(row.caps, row.estimates)):
                ratio = row.ratios[k - 1] if k > 0 else None
                out.append((row.c, m, estimate.mean, estimate.std_err, ratio, row.verdict))
        return out


def _verdict(ratios: Sequence[float], increment: MCEstimate, cutoff: float, n_sigma: float) -> str:
    last = ratios[-1]
    if last < cutoff:
        return "plateau"
    if increment.mean > n_sigma * increment.std_err:
        return "growing"
    return "inconclusive"


def _setting_kernel(setting: Setting, pot: PotentialSpec, caps: np.ndarray, u0, point, n_steps, h, alpha, bridge):
    if setting == "fullspace":
        return partial(_fullspace_kernel, pot=pot, caps=caps, u0=u0, x=point, n_steps=n_steps, h=h, bridge=bridge)
    if setting == "stable":
        return partial(_stable_kernel, alpha=alpha, pot=pot, caps=caps, u0=u0, x=point, n_steps=n_steps, h=h)
    if point[-1] < 0:
        raise DomainError("half-space sweeps need x_N >= 0")
    return partial(_halfspace_kernel, pot=pot, caps=caps, u0=u0, x=point, n_steps=n_steps, h=h)


def threshold_sweep(
    setting: Setting,
    N: int,
    c_list: Sequence[float],
    m_list: Sequence[float],
    t: float,
    x,
    grid: PathGrid,
    rng: RngStream,
    *,
    u0: InitialDatum | None = None,
    alpha: float | None = None,
    beta: float | None = None,
    plateau_cutoff: float = 1.05,
    n_sigma: float = 3.0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> SweepReport:
    """u_m over increasing caps for each strength c, with trend verdicts.

    All strengths and caps share one path stream. The verdict is
    ``plateau`` when the last ratio u_{m_K}/u_{m_{K-1}} is below ``plateau_cutoff``,
    ``growing`` when it is not and the last increment is ``n_sigma`` standard
    errors above zero, ``inconclusive`` otherwise.
    """
    N = _check_dim(N, 2 if setting == "halfspace" else 1)
    if setting not in ("fullspace", "stable", "halfspace"):
        raise DomainError(f"unknown setting {setting!r}")
    caps = np.asarray([float(m) for m in m_list])
    if caps.size < 2 or np.any(np.diff(caps) <= 0) or caps[0] <= 0:
        raise DomainError("m_list must hold at least two increasing positive caps")
    if setting == "stable" and alpha is None:
        raise DomainError("stable sweeps need alpha")
    default_beta = {"fullspace": 2.0, "stable": alpha, "halfspace": 1.0}[setting]
    flavor = "boundary" if setting == "halfspace" else "bulk"
    u0 = u0 or InitialDatum(kind="gaussian_bump")
    point = as_point(x, N)
    n_steps, h = grid.steps(t)
    rows: list[SweepRow] = []
    violations = 0
    with traced("threshold_sweep", announce=True, setting=setting, N=N, c_list=list(c_list), m_list=caps.tolist()):
        for c in c_list:
            pot = PotentialSpec(c=c, beta=beta if beta is not None else default_beta, flavor=flavor)
            inner = _setting_kernel(setting, pot, caps, u0, point, n_steps, h, alpha, grid.bridge_correction)
            result = run_batches(
                partial(_sweep_kernel, inner=inner),
                grid.n_paths,
                rng,
                batch_size=batch_size,
                workers=workers,
                monotone_width=caps.size,
                label=f"sweep_c={c:g}",
            )
            estimates = result.columns[: caps.size]
            increments = result.columns[caps.size :]
            ratios = tuple(b.mean / a.mean if a.mean > 0 else math.inf for a, b in zip(estimates, estimates[1:]))
            try:
                position = threshold_position(setting, N, c, alpha)
            except DomainError:
                position = None
            verdict = _verdict(ratios, increments[-1], plateau_cutoff, n_sigma)
            rows.append(
                SweepRow(
                    c=float(c),
                    caps=tuple(caps.tolist()),
                    estimates=tuple(estimates),
                    ratios=ratios,
                    last_increment=increments[-1],
                    verdict=verdict,
                    position=position,
                )
            )
            violations += result.monotone_violations
            logger.info("sweep c=%g: ratios=%s verdict=%s", c, ", ".join(f"{r:.4f}" for r in ratios), verdict)
    if violations:
        logger.warning("%d cap-monotonicity violations across the sweep", violations)
    return SweepReport(setting=setting, N=N, rows=tuple(rows), monotone_violations=violations, plateau_cutoff=plateau_cutoff)
