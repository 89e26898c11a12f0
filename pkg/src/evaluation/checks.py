"""Named self-checks of the samplers and the appendix identities.

Each check compares a sampler or a quadrature against an exact transform and
returns a ``CheckReport``; ``law check`` and ``appendix check`` run them by name.
"""

from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import special, stats

from src.sampling.batches import DEFAULT_BATCH_SIZE
from src.sampling.estimate import MCEstimate
from src.sampling.laws import (
    bessel_transition_density,
    hitting_time_laplace,
    hitting_time_sample,
    hw_large_z_limit,
    hw_z_marginal,
    last_zero_decomposition_sample,
    local_time_exp_box,
    local_time_joint_sample,
    subordinator_laplace,
    subordinator_sample,
)
from src.sampling.rng import RngStream
from src.simulation.halfspace_stable import (
    cauchy_cf,
    cauchy_skeleton_sample,
    decomp_second_term_check,
    laplace_identity,
    prelat_identity_check,
    relativistic_cf,
    relativistic_clock_sample,
)
from src.simulation.models import InitialDatum, PathGrid, PotentialSpec
from src.utils.errors import DomainError
from src.utils.telemetry import traced

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckOptions:
    n_draws: int = 1_000_000
    n_sigma: float = 3.0
    batch_size: int = DEFAULT_BATCH_SIZE
    workers: int = 1


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    statistics: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "statistics": self.statistics}


Check = Callable[[RngStream, CheckOptions], CheckReport]

LAW_CHECKS: dict[str, Check] = {}
APPENDIX_CHECKS: dict[str, Check] = {}
_GROUPS = {"law": LAW_CHECKS, "appendix": APPENDIX_CHECKS}


def register(group: str, name: str) -> Callable[[Check], Check]:
    registry = _GROUPS[group]

    def decorate(fn: Check) -> Check:
        registry[name] = fn
        return fn

    return decorate


def _transform_rows(samples: np.ndarray, args: Sequence[float], statistic, exact, n_sigma: float) -> tuple[bool, list[dict]]:
    rows = []
    for arg in args:
        estimate = MCEstimate.from_samples(statistic(samples, arg))
        target = float(exact(arg))
        z = abs(estimate.mean - target) / estimate.std_err if estimate.std_err > 0 else 0.0
        rows.append({"arg": list(arg) if isinstance(arg, tuple) else arg, "mc": estimate.mean, "std_err": estimate.std_err, "exact": target, "z": z})
    return all(row["z"] < n_sigma for row in rows), rows


# Law checks
# 1. Stable subordinator Laplace transform
@register("law", "subordinator_laplace")
def check_subordinator_laplace(rng: RngStream, options: CheckOptions) -> CheckReport:
    t = 1.0
    stats_out: dict[str, Any] = {}
    passed = True
    for index, alpha in enumerate((0.5, 1.0, 1.5)):
        samples = subordinator_sample(alpha, t, rng.derive(index), options.n_draws)
        ok, rows = _transform_rows(
            samples, (0.5, 1.0, 2.0), lambda s, lam: np.exp(-lam * s), lambda lam: subordinator_laplace(alpha, t, lam), options.n_sigma
        )
        stats_out[f"alpha={alpha}"] = rows
        passed &= ok
    return CheckReport("subordinator_laplace", passed, stats_out)


# 2. First-passage Laplace transform
@register("law", "hitting_laplace")
def check_hitting_laplace(rng: RngStream, options: CheckOptions) -> CheckReport:
    a = 1.0
    samples = hitting_time_sample(a, rng, options.n_draws)
    passed, rows = _transform_rows(
        samples, (0.5, 1.0, 2.0), lambda s, lam: np.exp(-lam * s), lambda lam: hitting_time_laplace(a, lam), options.n_sigma
    )
    return CheckReport("hitting_laplace", passed, {"level": a, "rows": rows})


# 3. Local time on the box
@register("law", "local_time_box")
def check_local_time_box(rng: RngStream, options: CheckOptions) -> CheckReport:
    kappa, s = 1.0, 1.0
    rows = []
    for index, x in enumerate((0.0, 0.5)):
        local_time, endpoint = local_time_joint_sample(x, s, rng.derive(index), options.n_draws)
        estimate = MCEstimate.from_samples(np.exp(kappa * local_time) * (np.abs(endpoint) < 1.0))
        exact = local_time_exp_box(kappa, s, x)
        rows.append({"x": x, "mc": estimate.mean, "std_err": estimate.std_err, "exact": exact, "z": abs(estimate.mean - exact) / estimate.std_err})
    return CheckReport("local_time_box", all(row["z"] < options.n_sigma for row in rows), {"kappa": kappa, "s": s, "rows": rows})


# 4. Equivalences in law (KS)
@register("law", "levy_equivalence")
def check_levy_equivalence(rng: RngStream, options: CheckOptions, p_min: float = 0.01) -> CheckReport:
    t = 1.0
    n = min(options.n_draws, 200_000)
    running_max = stats.halfnorm(scale=math.sqrt(t)).cdf
    local_time, endpoint = local_time_joint_sample(0.0, t, rng.derive(3), n)
    _, meander = last_zero_decomposition_sample(t, rng.derive(0), n)
    # alpha = 1 subordinator against the first passage of level t / sqrt(2)
    subordinator = subordinator_sample(1.0, t, rng.derive(1), n)
    passage = hitting_time_sample(t / math.sqrt(2.0), rng.derive(2), n)
    tests = {
        "local_time_vs_running_max": stats.kstest(local_time, running_max),
        "abs_endpoint_vs_running_max": stats.kstest(np.abs(endpoint), running_max),
        "meander_vs_running_max": stats.kstest(meander, running_max),
        "subordinator_vs_passage": stats.ks_2samp(subordinator, passage),
    }
    statistics: dict[str, Any] = {
        name: {"statistic": float(result.statistic), "pvalue": float(result.pvalue)} for name, result in tests.items()
    }
    statistics["p_min"] = p_min
    return CheckReport("levy_equivalence", all(result.pvalue > p_min for result in tests.values()), statistics)


# 5. Hartman-Watson marginal and large-z limit
@register("law", "hartman_watson")
def check_hartman_watson(rng: RngStream, options: CheckOptions, marginal_rel: float = 1e-6, limit_rel: float = 0.02) -> CheckReport:
    delta, r, t, xi = 3.0, 1.0, 1.0, 1.0
    marginal = hw_z_marginal(delta, r, t, xi)
    transition = bessel_transition_density(delta, r, t, xi)
    z, limit = hw_large_z_limit(1.0)
    k0 = float(special.k0(1.0))
    marginal_err = abs(marginal - transition) / transition
    limit_err = abs(limit - k0) / k0
    statistics = {
        "marginal": marginal,
        "transition_density": transition,
        "marginal_rel_err": marginal_err,
        "large_z": z,
        "scaled_theta": limit,
        "k0": k0,
        "limit_rel_err": limit_err,
    }
    return CheckReport("hartman_watson", marginal_err < marginal_rel and limit_err < limit_rel, statistics)


# Appendix checks
# 1. Cauchy process as subordinated Brownian motion
@register("appendix", "cauchy_cf")
def check_cauchy_cf(rng: RngStream, options: CheckOptions) -> CheckReport:
    levels = (0.0, 0.5, 1.0)
    skeleton = cauchy_skeleton_sample(2, levels, rng, options.n_draws)
    a = levels[-1]
    frequencies = ((0.5, 0.0), (0.6, 0.8), (1.2, 1.6))
    passed, rows = _transform_rows(
        skeleton.endpoint,
        frequencies,
        lambda s, xi: np.cos(s @ np.asarray(xi)),
        lambda xi: cauchy_cf(a, math.hypot(*xi)),
        options.n_sigma,
    )
    return CheckReport("cauchy_cf", passed, {"a": a, "d": 2, "rows": rows})


# 2. Relativistic process from the drifted passage clock
@register("appendix", "relativistic_cf")
def check_relativistic_cf(rng: RngStream, options: CheckOptions) -> CheckReport:
    m, level = 1.0, 1.0
    gen = rng.generator()
    clock = relativistic_clock_sample(m, level, gen, options.n_draws)
    position = np.sqrt(clock) * gen.standard_normal(options.n_draws)
    passed, rows = _transform_rows(
        position, (0.5, 1.0, 2.0), lambda s, xi: np.cos(xi * s), lambda xi: relativistic_cf(m, level, xi), options.n_sigma
    )
    return CheckReport("relativistic_cf", passed, {"m": m, "level": level, "rows": rows})


# 3. Laplace identity between the boundary problem and the relativistic one
@register("appendix", "prelat")
def check_prelat(rng: RngStream, options: CheckOptions) -> CheckReport:
    m = 1.0
    u0 = InitialDatum(kind="gaussian_bump", radius=1.0)
    n_paths = max(options.n_draws // 10, 1000)
    # zero, constant, and c / (1 + |x'|)
    cases = (
        (PotentialSpec(c=0.0, beta=0.0, cap=m, flavor="boundary"), PathGrid(t_end=1.0, dt=0.05, n_paths=n_paths)),
        (PotentialSpec(c=0.25, beta=0.0, cap=m, flavor="boundary"), PathGrid(t_end=1.0, dt=0.05, n_paths=n_paths)),
        (PotentialSpec(c=0.5, beta=1.0, shift=1.0, cap=m, flavor="boundary"), PathGrid(t_end=1.0, dt=0.02, n_paths=n_paths)),
    )
    rows = []
    for index, (pot, grid) in enumerate(cases):
        pair = prelat_identity_check(m, (0.5,), pot, u0, grid, rng.derive(index), batch_size=options.batch_size, workers=options.workers)
        rows.append({"c": pot.c, "beta": pot.beta, "shift": pot.shift, **pair.to_dict(), "passed": pair.agrees(options.n_sigma, rel=0.05)})
    return CheckReport("prelat", all(row["passed"] for row in rows), {"m": m, "rows": rows})


# 4. Absorbed part of the last-zero decomposition
@register("appendix", "decomp")
def check_decomp(rng: RngStream, options: CheckOptions) -> CheckReport:
    u0 = InitialDatum(kind="box_indicator", radius=1.0, interval=(0.2, 1.0))
    result = decomp_second_term_check(
        1.0, (0.0, 0.5), u0, rng, max(options.n_draws // 5, 1000), n_sigma=options.n_sigma, batch_size=options.batch_size, workers=options.workers
    )
    return CheckReport("decomp", result.passed, result.to_dict())


# 5. Laplace transform behind the Phi_N kernel
@register("appendix", "phi")
def check_phi(rng: RngStream, options: CheckOptions, rel: float = 1e-8) -> CheckReport:
    rows = []
    for N in (1, 2, 3, 4):
        for m, a in ((1.0, 0.5), (1.0, 2.0), (0.3, 1.0)):
            quadrature, closed = laplace_identity(N, m, a)
            rows.append({"N": N, "m": m, "a": a, "quadrature": quadrature, "closed": closed, "rel_err": abs(quadrature - closed) / closed})
    return CheckReport("phi", all(row["rel_err"] < rel for row in rows), {"rows": rows})


def run_checks(group: str, names: Sequence[str] | None, rng: RngStream, options: CheckOptions = CheckOptions()) -> list[CheckReport]:
    """Run the named checks of a group; each gets a stream derived from its name."""
    if group not in _GROUPS:
        raise DomainError(f"unknown check group {group!r}; expected one of {sorted(_GROUPS)}")
    registry = _GROUPS[group]
    selected = list(registry) if not names else list(names)
    unknown = [name for name in selected if name not in registry]
    if unknown:
        raise DomainError(f"unknown {group} checks {unknown}; available: {sorted(registry)}")
    reports = []
    for name in selected:
        with traced(f"check.{name}", group=group, n_draws=options.n_draws) as span:
            report = registry[name](rng.derive(zlib.crc32(name.encode("utf-8"))), options)
            span.set_attribute("passed", report.passed)
        logger.info("check %s: %s", name, "passed" if report.passed else "FAILED")
        reports.append(report)
    return reports
