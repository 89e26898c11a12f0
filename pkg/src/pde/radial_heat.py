"""Crank-Nicolson solver for u_t = (1/2) (u_rr + (N-1)/r u_r) + V_m(r) u on [0, r_max].

Regularity at the origin uses the ghost value u_{-1} = u_1, which turns the
radial Laplacian into N u_rr there; u(r_max) = 0. Serves as the deterministic
reference for the whole-space Feynman-Kac estimator.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse, stats
from scipy.sparse.linalg import splu

from src.sampling.batches import DEFAULT_BATCH_SIZE
from src.sampling.estimate import MCEstimate
from src.sampling.rng import RngStream
from src.simulation.fk_mc import fk_fullspace
from src.simulation.models import InitialDatum, PathGrid, PotentialSpec, as_point
from src.utils.errors import DomainError, NumericError
from src.utils.telemetry import traced

logger = logging.getLogger(__name__)

BOUNDARY_MASS_LIMIT = 1e-6
_EDGE_FRACTION = 0.05


class RadialGrid(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    r_max: Annotated[float | None, Field(gt=0.0, description="Outer radius; default 8 sqrt(t) + support")] = None
    n_r: Annotated[int, Field(ge=16)] = 801
    n_t: Annotated[int, Field(ge=4)] = 400


@dataclass(frozen=True)
class RadialField:
    r_max: float
    n_r: int
    values: np.ndarray
    t: float
    boundary_mass: float

    @property
    def radii(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n_r)

    def at(self, r) -> float | np.ndarray:
        out = np.interp(np.asarray(r, dtype=float), self.radii, self.values, right=0.0)
        return float(out) if np.ndim(out) == 0 else out


def _operator(N: int, radii: np.ndarray, potential: np.ndarray) -> sparse.csc_matrix:
    """Discrete (1/2) radial Laplacian plus V on the unknowns r_0 .. r_{n-2}."""
    dr = radii[1] - radii[0]
    inner = radii[1:-1]
    n = radii.size - 1
    main = np.empty(n)
    upper = np.empty(n - 1)
    lower = np.empty(n - 1)
    main[0] = -N / dr**2 + potential[0]
    upper[0] = N / dr**2
    main[1:] = -1.0 / dr**2 + potential[1:-1]
    drift = (N - 1) / (2.0 * inner * dr)
    lower[:] = 0.5 * (1.0 / dr**2 - drift)
    upper[1:] = 0.5 * (1.0 / dr**2 + drift[:-1])
    return sparse.diags((lower, main, upper), (-1, 0, 1), format="csc")


def _boundary_mass(N: int, radii: np.ndarray, values: np.ndarray) -> float:
    weights = np.abs(values) * radii ** (N - 1)
    total = float(np.trapezoid(weights, radii))
    if total == 0.0:
        return 0.0
    edge = radii >= (1.0 - _EDGE_FRACTION) * radii[-1]
    return float(np.trapezoid(weights[edge], radii[edge])) / total


def radial_heat_solve(N: int, pot: PotentialSpec, u0_radial: InitialDatum, t: float, grid: RadialGrid = RadialGrid()) -> RadialField:
    if int(N) != N or N < 2:
        raise DomainError(f"radial solver needs N >= 2, got {N!r}")
    pot.require_flavor("bulk", "radial_heat_solve")
    pot.require_cap("radial_heat_solve")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    support = u0_radial.support_radius()
    if not math.isfinite(support):
        raise DomainError("radial solver needs an initial datum supported inside r_max")
    r_max = grid.r_max if grid.r_max is not None else 8.0 * math.sqrt(t) + support
    if support >= r_max:
        raise DomainError(f"initial datum support {support:g} reaches r_max={r_max:g}")
    radii = np.linspace(0.0, r_max, grid.n_r)
    dt = t / grid.n_t
    A = _operator(int(N), radii, pot.evaluate(radii))
    identity = sparse.identity(A.shape[0], format="csc")
    implicit = (identity - 0.5 * dt * A).tocsc()
    explicit = (identity + 0.5 * dt * A).tocsr()
    if np.any(implicit.diagonal() <= 0):
        raise NumericError("implicit matrix lost its positive diagonal; reduce the time step", cap=pot.cap, dt=dt)
    with traced("radial_heat_solve", N=N, cap=pot.cap, t=t, n_r=grid.n_r, n_t=grid.n_t):
        try:
            factor = splu(implicit)
        except RuntimeError as exc:
            raise NumericError("tridiagonal factorization failed", detail=str(exc)) from exc
        u = u0_radial.radial(radii[:-1]).astype(float)
        for _ in range(grid.n_t):
            u = factor.solve(explicit @ u)
        if not np.all(np.isfinite(u)):
            raise NumericError("non-finite values in the radial solution", t=t, cap=pot.cap)
    values = np.append(u, 0.0)
    mass = _boundary_mass(int(N), radii, values)
    if mass > BOUNDARY_MASS_LIMIT:
        logger.warning("boundary contamination: %.2e of the mass sits near r_max=%g", mass, r_max)
    return RadialField(r_max=r_max, n_r=grid.n_r, values=values, t=t, boundary_mass=mass)


def heat_reference(N: int, u0_radial: InitialDatum, t: float, r) -> float | np.ndarray:
    """E[u0(|r e_1 + B_t|)] without potential, in closed form."""
    r = np.asarray(r, dtype=float)
    if u0_radial.kind == "gaussian_bump":
        spread = u0_radial.radius**2 + t
        out = u0_radial.amplitude * (u0_radial.radius**2 / spread) ** (N / 2.0) * np.exp(-np.square(r) / (2.0 * spread))
    elif u0_radial.kind == "box_indicator":
        out = u0_radial.amplitude * stats.ncx2.cdf(u0_radial.radius**2 / t, N, np.maximum(np.square(r) / t, 1e-300))
    else:
        out = np.full_like(r, u0_radial.amplitude)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PdeComparison:
    mc: MCEstimate
    pde: float
    passed: bool
    n_sigma: float
    rel: float

    @property
    def difference(self) -> float:
        return self.mc.mean - self.pde

    def to_dict(self) -> dict:
        return {
            "mc": self.mc.to_dict(),
            "pde": self.pde,
            "difference": self.difference,
            "passed": self.passed,
            "n_sigma": self.n_sigma,
            "rel": self.rel,
        }


def mc_vs_pde_check(
    N: int,
    pot: PotentialSpec,
    u0_radial: InitialDatum,
    t: float,
    x,
    grid: PathGrid,
    rng: RngStream,
    *,
    pde_grid: RadialGrid = RadialGrid(),
    n_sigma: float = 3.0,
    rel: float = 0.02,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> PdeComparison:
    """Feynman-Kac estimate at x against the radial solution at |x|; passes within max(n_sigma se, rel |pde|)."""
    point = as_point(x, N)
    field = radial_heat_solve(N, pot, u0_radial, t, pde_grid)
    pde = field.at(float(np.linalg.norm(point)))
    mc = fk_fullspace(N, pot, u0_radial, t, point, grid, rng, batch_size=batch_size, workers=workers)
    passed = abs(mc.mean - pde) < max(n_sigma * mc.std_err, rel * abs(pde))
    logger.info("mc vs pde: mc=%.6g +- %.2g pde=%.6g passed=%s", mc.mean, mc.std_err, pde, passed)
    return PdeComparison(mc=mc, pde=pde, passed=passed, n_sigma=n_sigma, rel=rel)
