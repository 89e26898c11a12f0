"""Scalar special functions: gamma, sphere area, Bessel J/I/K, J-zeros, erfc, heat kernel.

Thin, validated wrappers over ``scipy.special``. Every function is pure and
accepts numpy arrays where that makes sense. The only shared state is the
per-order table of J-zeros, built once and never mutated.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize, special

from src.utils.errors import DomainError, NumericError

logger = logging.getLogger(__name__)

ZERO_SCAN_STEP = 0.25
ZERO_XTOL = 1e-14
_MIN_TABLE = 32


def _check_dim(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def gamma_fn(x: ArrayLike) -> float | np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0) or np.any(np.isnan(arr)):
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    out = special.gamma(arr)
    return float(out) if out.ndim == 0 else out


def sphere_area(n: int) -> float:
    """Surface area 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n."""
    n = _check_dim(n)
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int) -> float:
    return sphere_area(n) / _check_dim(n)


def bessel_j(mu: float, x: ArrayLike) -> float | np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("bessel_j is evaluated for x >= 0 only")
    out = special.jv(mu, arr)
    return float(out) if out.ndim == 0 else out


def bessel_i(nu: float, x: ArrayLike) -> float | np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("bessel_i is evaluated for x >= 0 only")
    out = special.iv(nu, arr)
    if not np.all(np.isfinite(out)):
        raise NumericError("I_nu overflows; use bessel_i_scaled", nu=nu, x_max=float(np.max(arr)))
    return float(out) if out.ndim == 0 else out


def bessel_i_scaled(nu: float, x: ArrayLike) -> float | np.ndarray:
    """e^{-x} I_nu(x)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("bessel_i_scaled is evaluated for x >= 0 only")
    out = special.ive(nu, arr)
    return float(out) if out.ndim == 0 else out


def bessel_k(nu: float, x: ArrayLike) -> float | np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("bessel_k requires x > 0")
    out = special.kv(nu, arr)
    return float(out) if out.ndim == 0 else out


def bessel_k_scaled(nu: float, x: ArrayLike) -> float | np.ndarray:
    """e^{x} K_nu(x)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("bessel_k_scaled requires x > 0")
    out = special.kve(nu, arr)
    return float(out) if out.ndim == 0 else out


def erfc(x: ArrayLike) -> float | np.ndarray:
    out = special.erfc(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def gauss_cdf(x: ArrayLike) -> float | np.ndarray:
    out = special.ndtr(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def gauss_kernel(d: int, t: float, x: ArrayLike) -> float | np.ndarray:
    """Heat kernel (2 pi t)^{-d/2} exp(-|x|^2 / 2t).

    ``x`` is a point of R^d (last axis of length d) or, for d == 1, any
    array of scalars.
    """
    d = _check_dim(d)
    if t <= 0:
        raise DomainError(f"gauss_kernel requires t > 0, got {t!r}")
    arr = np.asarray(x, dtype=float)
    if d == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        sq = arr * arr
    else:
        if arr.shape[-1] != d:
            raise DomainError(f"point has {arr.shape[-1]} coordinates, expected {d}")
        sq = np.sum(arr * arr, axis=-1)
    out = (2.0 * math.pi * t) ** (-d / 2.0) * np.exp(-sq / (2.0 * t))
    return float(out) if np.ndim(out) == 0 else out


def mcmahon_zero(mu: float, k: int) -> float:
    """Leading asymptotic (k + mu/2 - 1/4) pi of the k-th zero of J_mu."""
    return (k + 0.5 * mu - 0.25) * math.pi


def _scan_brackets(mu: float, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray, float]:
    n = max(int(math.ceil((hi - lo) / ZERO_SCAN_STEP)), 1)
    grid = lo + ZERO_SCAN_STEP * np.arange(n + 1)
    negative = np.signbit(special.jv(mu, grid))
    idx = np.flatnonzero(negative[1:] != negative[:-1])
    return grid[idx], grid[idx + 1], float(grid[-1])


def _build_zero_table(mu: float, count: int) -> np.ndarray:
    # J_mu > 0 on (0, j_1) and sqrt((mu+1)(mu+5)) is a lower bound for j_1
    lo = 0.9 * math.sqrt((mu + 1.0) * (mu + 5.0))
    zeros: list[float] = []
    rounds = 0
    while len(zeros) < count:
        rounds += 1
        if rounds > 64:
            raise NumericError("zero scan did not find enough sign changes", mu=mu, found=len(zeros), wanted=count)
        remaining = count - len(zeros)
        hi = max(lo, mcmahon_zero(mu, len(zeros) + 1)) + (remaining + 2) * math.pi
        left, right, lo = _scan_brackets(mu, lo, hi)
        for a, b in zip(left, right):
            root, info = optimize.brentq(
                lambda x: special.jv(mu, x), a, b, xtol=ZERO_XTOL, rtol=4 * np.finfo(float).eps,
                maxiter=200, full_output=True,
            )
            if not info.converged:
                raise NumericError(
                    "zero polishing did not converge", mu=mu, k=len(zeros) + 1, bracket=(a, b),
                    iterations=info.iterations, flag=info.flag,
                )
            zeros.append(root)
            if len(zeros) == count:
                break
    table = np.asarray(zeros, dtype=float)
    if np.any(np.diff(table) <= 0):
        raise NumericError("zero table is not strictly increasing", mu=mu)
    table.setflags(write=False)
    logger.debug("built J-zero table mu=%g count=%d", mu, count)
    return table


@lru_cache(maxsize=128)
def _zero_table(mu: float, size: int) -> np.ndarray:
    return _build_zero_table(mu, size)


def bessel_j_zeros(mu: float, count: int) -> np.ndarray:
    """First ``count`` positive zeros of J_mu, as a read-only array."""
    if not mu > -1:
        raise DomainError(f"J-zeros need mu > -1, got {mu!r}")
    if count < 1:
        raise DomainError("count must be >= 1")
    size = max(_MIN_TABLE, 1 << (int(count) - 1).bit_length())
    return _zero_table(float(mu), size)[:count]


def bessel_j_zero(mu: float, k: int) -> float:
    if int(k) != k or k < 1:
        raise DomainError(f"zero index must be a positive integer, got {k!r}")
    return float(bessel_j_zeros(mu, int(k))[int(k) - 1])
