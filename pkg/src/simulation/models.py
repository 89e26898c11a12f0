"""Data records shared by the Feynman-Kac engines and the experiment configs.

The records are frozen pydantic models, so an experiment JSON file validates
straight into them and an invalid record never reaches a sampler.
"""

from __future__ import annotations

import math
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.utils.errors import DomainError


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PotentialSpec(_Record):
    """V(r) = c (shift + r)^{-beta}, evaluated as min(cap, V) when a cap is set.

    ``r`` is |x| in the bulk and the lateral distance |x'| on the boundary.
    ``shift > 0`` gives the bounded profiles used by the appendix checks.
    """

    c: Annotated[float, Field(ge=0.0, description="Strength")]
    beta: Annotated[float, Field(ge=0.0, description="Singularity exponent")] = 2.0
    cap: Annotated[float | None, Field(ge=0.0, description="Level m of V_m = min(m, V)")] = None
    flavor: Literal["bulk", "boundary"] = "bulk"
    shift: Annotated[float, Field(ge=0.0)] = 0.0

    def raw(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.c == 0.0:
            return np.zeros_like(r)
        if self.beta == 0.0:
            return np.full_like(r, self.c)
        with np.errstate(divide="ignore"):
            return self.c * np.power(self.shift + r, -self.beta)

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        values = self.raw(r)
        return values if self.cap is None else np.minimum(values, self.cap)

    def capped(self, m: float) -> "PotentialSpec":
        return self.model_copy(update={"cap": float(m)})

    @property
    def sup(self) -> float:
        if self.c == 0.0:
            return 0.0
        if self.beta == 0.0:
            peak = self.c
        elif self.shift > 0.0:
            peak = self.c * self.shift**-self.beta
        else:
            peak = math.inf
        return peak if self.cap is None else min(peak, self.cap)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.sup)

    def require_cap(self, where: str) -> None:
        if self.cap is None:
            raise DomainError(
                f"{where} needs a capped potential: the expectation is built from V_m = min(m, V), "
                "set 'cap' to the level m"
            )

    def require_flavor(self, flavor: str, where: str) -> None:
        if self.flavor != flavor:
            raise DomainError(f"{where} expects a {flavor} potential, got {self.flavor}")


InitialKind = Literal["gaussian_bump", "box_indicator", "constant_one"]


class InitialDatum(_Record):
    """Nonnegative initial datum u_0.

    gaussian_bump   amplitude * exp(-|y - center|^2 / (2 radius^2))
    box_indicator   amplitude on the ball |y - center| < radius; in the half-space
                    the ball is lateral and the normal coordinate must lie in ``interval``
    constant_one    amplitude everywhere
    """

    kind: InitialKind = "gaussian_bump"
    center: tuple[float, ...] | None = None
    radius: Annotated[float, Field(gt=0.0)] = 1.0
    amplitude: Annotated[float, Field(gt=0.0)] = 1.0
    interval: tuple[float, float] | None = None

    @model_validator(mode="after")
    def _check_interval(self) -> "InitialDatum":
        if self.interval is not None:
            lo, hi = self.interval
            if not 0.0 <= lo < hi:
                raise ValueError("interval must satisfy 0 <= l < r")
        return self

    def center_in(self, dim: int) -> np.ndarray:
        if self.center is None:
            return np.zeros(dim)
        if len(self.center) != dim:
            raise DomainError(f"initial datum center has {len(self.center)} coordinates, expected {dim}")
        return np.asarray(self.center, dtype=float)

    @property
    def is_radial(self) -> bool:
        return self.kind == "constant_one" or self.center is None or not any(self.center)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """u_0 at whole-space points of shape (n, N)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "constant_one":
            return np.full(points.shape[0], self.amplitude)
        d2 = np.sum(np.square(points - self.center_in(points.shape[1])), axis=1)
        if self.kind == "gaussian_bump":
            return self.amplitude * np.exp(-d2 / (2.0 * self.radius**2))
        return np.where(d2 < self.radius**2, self.amplitude, 0.0)

    def evaluate_halfspace(self, lateral: np.ndarray, normal: np.ndarray) -> np.ndarray:
        """u_0(x', x_N) with lateral points of shape (n, N-1) and x_N >= 0 of shape (n,)."""
        lateral = np.asarray(lateral, dtype=float)
        normal = np.asarray(normal, dtype=float)
        if self.kind == "constant_one":
            return np.full(normal.shape, self.amplitude)
        dim = lateral.shape[1] + 1
        center = self.center_in(dim)
        d2 = np.sum(np.square(lateral - center[:-1]), axis=1)
        if self.kind == "gaussian_bump":
            d2 = d2 + np.square(normal - center[-1])
            return self.amplitude * np.exp(-d2 / (2.0 * self.radius**2))
        lo, hi = self.interval if self.interval is not None else (0.0, math.inf)
        inside = (d2 < self.radius**2) & (normal > lo) & (normal < hi)
        return np.where(inside, self.amplitude, 0.0)

    def radial(self, r: np.ndarray) -> np.ndarray:
        """Profile f(r) of a rotationally symmetric datum."""
        if not self.is_radial:
            raise DomainError("radial profile needs a datum centred at the origin")
        r = np.asarray(r, dtype=float)
        if self.kind == "constant_one":
            return np.full_like(r, self.amplitude)
        if self.kind == "gaussian_bump":
            return self.amplitude * np.exp(-np.square(r) / (2.0 * self.radius**2))
        return np.where(r < self.radius, self.amplitude, 0.0)

    def support_radius(self) -> float:
        """Radius outside which u_0 is below 1e-14 of its peak (inf for constants)."""
        offset = 0.0 if self.center is None else float(np.linalg.norm(self.center))
        if self.kind == "constant_one":
            return math.inf
        if self.kind == "gaussian_bump":
            return offset + 8.0 * self.radius
        return offset + self.radius


class ExperimentGeometry(_Record):
    """Event data: splitting fraction a, disc D = B(center, radius), interval J, level eps0."""

    a: Annotated[float, Field(gt=0.0, lt=0.5)] = 0.25
    disc_center: tuple[float, ...] | None = None
    disc_radius: Annotated[float, Field(gt=0.0)] = 1.0
    interval: tuple[float, float] = (0.2, 1.0)
    eps0: Annotated[float, Field(gt=0.0)] = 1.0

    @model_validator(mode="after")
    def _check_interval(self) -> "ExperimentGeometry":
        lo, hi = self.interval
        if not 0.0 < lo < hi:
            raise ValueError("interval J must satisfy 0 < l < r")
        return self

    @property
    def gamma(self) -> float:
        return 1.0 - 2.0 * self.a

    def disc_center_in(self, dim: int) -> np.ndarray:
        if self.disc_center is None:
            return np.zeros(dim)
        if len(self.disc_center) != dim:
            raise DomainError(f"disc center has {len(self.disc_center)} coordinates, expected {dim}")
        return np.asarray(self.disc_center, dtype=float)


class PathGrid(_Record):
    t_end: Annotated[float, Field(gt=0.0)]
    dt: Annotated[float, Field(gt=0.0)]
    n_paths: Annotated[int, Field(ge=1)]
    bridge_correction: bool = False

    @model_validator(mode="after")
    def _check_step(self) -> "PathGrid":
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        return self

    def steps(self, t: float | None = None) -> tuple[int, float]:
        """(number of steps, uniform step) covering [0, t]; t defaults to t_end."""
        horizon = self.t_end if t is None else float(t)
        if not 0.0 < horizon <= self.t_end * (1.0 + 1e-12):
            raise DomainError(f"time {horizon!r} outside the grid horizon (0, {self.t_end}]")
        n_steps = max(1, math.ceil(horizon / self.dt - 1e-9))
        return n_steps, horizon / n_steps


def as_point(x: float | tuple[float, ...] | list[float] | np.ndarray, dim: int) -> np.ndarray:
    """Start point as a length-``dim`` vector; a scalar r means (r, 0, ..., 0)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        point = np.zeros(dim)
        point[0] = float(arr)
        return point
    if arr.shape != (dim,):
        raise DomainError(f"start point must have {dim} coordinates, got shape {arr.shape}")
    return arr
