"""Named threshold constants and how they compare asymptotically.

Three settings share one pattern: a sufficient condition for blow-up built from
the first J-zero, and the best constant of the matching Hardy-type inequality.

    setting     potential      sufficient           best constant
    fullspace   c / r^2        j_{(N-2)/2,1}^2 / 2  hardy_constant(N)
    stable      c / r^alpha    j_{(N-2)/2,1}^alpha  frac_hardy_constant(N, alpha)
    halfspace   c / r (edge)   j_{(N-3)/2,1}        kato_constant(N)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from scipy import special

from src.analysis.specfun import bessel_j_zero
from src.utils.errors import AcceptanceError, DomainError

Setting = Literal["fullspace", "stable", "halfspace"]


def _check_dim(N: int, minimum: int = 1) -> int:
    if int(N) != N or N < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {N!r}")
    return int(N)


def _check_alpha(alpha: float, *, allow_two: bool = False) -> float:
    upper_ok = alpha <= 2 if allow_two else alpha < 2
    if not (alpha > 0 and upper_ok):
        raise DomainError(f"alpha must lie in (0, 2), got {alpha!r}")
    return float(alpha)


def hardy_constant(N: int) -> float:
    N = _check_dim(N, 3)
    return 0.5 * ((N - 2) / 2.0) ** 2


def frac_hardy_constant(N: int, alpha: float) -> float:
    """2^alpha Gamma((N+alpha)/4)^2 / Gamma((N-alpha)/4)^2, best fractional Hardy constant."""
    N = _check_dim(N)
    alpha = _check_alpha(alpha, allow_two=True)
    if not N > alpha:
        raise DomainError(f"fractional Hardy constant needs N > alpha (N={N}, alpha={alpha})")
    log_ratio = special.gammaln((N + alpha) / 4.0) - special.gammaln((N - alpha) / 4.0)
    return 2.0**alpha * math.exp(2.0 * log_ratio)


def kato_constant(N: int) -> float:
    """2 Gamma(N/4)^2 / Gamma((N-2)/4)^2, best constant of Kato's inequality on the half-space."""
    N = _check_dim(N, 3)
    log_ratio = special.gammaln(N / 4.0) - special.gammaln((N - 2) / 4.0)
    return 2.0 * math.exp(2.0 * log_ratio)


def cond_bm(N: int) -> float:
    N = _check_dim(N)
    return 0.5 * bessel_j_zero((N - 2) / 2.0, 1) ** 2


def cond_stable(N: int, alpha: float) -> float:
    N = _check_dim(N)
    alpha = _check_alpha(alpha)
    if not N > alpha:
        raise DomainError(f"stable condition is stated for the transient case N > alpha (N={N}, alpha={alpha})")
    return bessel_j_zero((N - 2) / 2.0, 1) ** alpha


def cond_boundary(N: int) -> float:
    N = _check_dim(N, 3)
    return bessel_j_zero((N - 3) / 2.0, 1)


@dataclass(frozen=True)
class ConditionConstants:
    cond_bm: float | None
    cond_stable: float | None
    cond_boundary: float | None


def condition_constants(N: int, alpha: float | None = None, *, strict: bool = True) -> ConditionConstants:
    """The three sufficient-condition constants.

    With ``strict`` a violated dimension constraint raises; otherwise that
    entry is None (used for report tables over mixed dimension ranges).
    """
    values: dict[str, float | None] = {}
    attempts = {
        "cond_bm": lambda: cond_bm(N),
        "cond_stable": (lambda: cond_stable(N, alpha)) if alpha is not None else None,
        "cond_boundary": lambda: cond_boundary(N),
    }
    for name, compute in attempts.items():
        if compute is None:
            values[name] = None
            continue
        try:
            values[name] = compute()
        except DomainError:
            if strict:
                raise
            values[name] = None
    return ConditionConstants(**values)


def j1_bounds(mu: float) -> tuple[float, float]:
    """(sqrt((mu+1)(mu+5)), sqrt(mu+1)(sqrt(mu+2)+1)), checked to bracket j_{mu,1}."""
    if not mu > -1:
        raise DomainError(f"mu must exceed -1, got {mu!r}")
    lower = math.sqrt((mu + 1.0) * (mu + 5.0))
    upper = math.sqrt(mu + 1.0) * (math.sqrt(mu + 2.0) + 1.0)
    j1 = bessel_j_zero(mu, 1)
    if not lower <= j1 <= upper:
        raise AcceptanceError("first zero outside its known bounds", mu=mu, lower=lower, upper=upper, j1=j1)
    return lower, upper


def _optional(fn, *args) -> float | None:
    try:
        return fn(*args)
    except DomainError:
        return None


@dataclass(frozen=True)
class ConstantReport:
    N: int
    alpha: float | None
    hardy: float | None
    frac_hardy: float | None
    kato: float | None
    cond_bm: float | None
    cond_stable: float | None
    cond_boundary: float | None
    ratios: dict[str, float] = field(default_factory=dict)

    CSV_HEADER = ("N", "hardy", "frac_hardy", "kato", "cond_bm", "cond_stable", "cond_boundary", "alpha")

    def csv_row(self) -> tuple:
        return (self.N, self.hardy, self.frac_hardy, self.kato, self.cond_bm, self.cond_stable, self.cond_boundary, self.alpha)


def constant_report(N: int, alpha: float | None = None) -> ConstantReport:
    N = _check_dim(N)
    if alpha is not None:
        _check_alpha(alpha)
    hardy = _optional(hardy_constant, N)
    frac = _optional(frac_hardy_constant, N, alpha) if alpha is not None else None
    kato = _optional(kato_constant, N)
    conds = condition_constants(N, alpha, strict=False)
    ratios: dict[str, float] = {}
    if hardy and conds.cond_bm is not None:
        ratios["bm_over_hardy"] = conds.cond_bm / hardy
    if frac and conds.cond_stable is not None:
        ratios["stable_over_frac_hardy"] = conds.cond_stable / frac
    if kato and conds.cond_boundary is not None:
        ratios["boundary_over_kato"] = conds.cond_boundary / kato
    return ConstantReport(
        N=N,
        alpha=alpha,
        hardy=hardy,
        frac_hardy=frac,
        kato=kato,
        cond_bm=conds.cond_bm,
        cond_stable=conds.cond_stable,
        cond_boundary=conds.cond_boundary,
        ratios=ratios,
    )


@dataclass(frozen=True)
class AsymptoticReport:
    """Ratio table over dimensions; ``monotone`` records whether each column decreases in N."""

    dims: tuple[int, ...]
    bm_over_hardy: tuple[float, ...]
    stable_over_frac_hardy: dict[float, tuple[float | None, ...]]
    boundary_over_kato: tuple[float, ...]
    monotone: dict[str, bool]
    at_least_one: dict[str, bool]


def _decreasing(values: Sequence[float | None]) -> bool:
    seen = [v for v in values if v is not None]
    return all(b < a for a, b in zip(seen, seen[1:]))


def asymptotic_report(N_list: Sequence[int], alphas: Sequence[float] = (0.5, 1.0, 1.5)) -> AsymptoticReport:
    dims = tuple(sorted({_check_dim(n, 3) for n in N_list}))
    if not dims:
        raise DomainError("N_list must contain at least one dimension >= 3")
    bm = tuple(cond_bm(n) / hardy_constant(n) for n in dims)
    boundary = tuple(cond_boundary(n) / kato_constant(n) for n in dims)
    stable: dict[float, tuple[float | None, ...]] = {}
    for alpha in alphas:
        alpha = _check_alpha(alpha)
        stable[alpha] = tuple(
            cond_stable(n, alpha) / frac_hardy_constant(n, alpha) if n > alpha else None for n in dims
        )
    monotone = {"bm_over_hardy": _decreasing(bm), "boundary_over_kato": _decreasing(boundary)}
    at_least_one = {"bm_over_hardy": min(bm) >= 1.0, "boundary_over_kato": min(boundary) >= 1.0}
    for alpha, column in stable.items():
        monotone[f"stable_over_frac_hardy[{alpha:g}]"] = _decreasing(column)
        at_least_one[f"stable_over_frac_hardy[{alpha:g}]"] = min(v for v in column if v is not None) >= 1.0
    return AsymptoticReport(
        dims=dims,
        bm_over_hardy=bm,
        stable_over_frac_hardy=stable,
        boundary_over_kato=boundary,
        monotone=monotone,
        at_least_one=at_least_one,
    )


@dataclass(frozen=True)
class ThresholdPosition:
    """Where a strength c sits between the best constant and the sufficient condition."""

    setting: str
    c: float
    best_constant: float | None
    sufficient: float
    zone: Literal["below_best", "gap", "above_sufficient"]


def threshold_position(setting: Setting, N: int, c: float, alpha: float | None = None) -> ThresholdPosition:
    if setting == "fullspace":
        best, sufficient = _optional(hardy_constant, N), cond_bm(N)
    elif setting == "stable":
        if alpha is None:
            raise DomainError("stable setting needs alpha")
        best, sufficient = _optional(frac_hardy_constant, N, alpha), cond_stable(N, alpha)
    elif setting == "halfspace":
        best, sufficient = kato_constant(N), cond_boundary(N)
    else:
        raise DomainError(f"unknown setting {setting!r}")
    if c > sufficient:
        zone = "above_sufficient"
    elif best is not None and c <= best:
        zone = "below_best"
    else:
        zone = "gap"
    return ThresholdPosition(setting=setting, c=c, best_constant=best, sufficient=sufficient, zone=zone)
