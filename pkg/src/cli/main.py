"""fkprobe command line.

USAGE:
    fkprobe [--seed N] [--workers N] [--out FILE] [--format json|csv] <command> [options]

    zeros            first zeros of J_mu
    confine          confinement probabilities from the eigen-series (optionally with the MC oracle)
    law sample       draws from one of the exact samplers
    law check        transform / KS checks of the samplers
    appendix check   time-change and Laplace-identity checks
    constants        threshold and best constants per dimension
    fk run           one Feynman-Kac experiment (--config file.json)
    pde solve        radial Crank-Nicolson reference (--config file.json)
    sweep            u_m over increasing caps (--config file.json)

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
4 a self-check failed (its results are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from pydantic import ValidationError

from src.analysis.confinement import SeriesCtl, confine_prob
from src.analysis.specfun import bessel_j_zeros
from src.analysis.thresholds import ConstantReport, constant_report, threshold_position
from src.cli.experiments import PARAMS, ExperimentConfig
from src.evaluation.checks import CheckOptions, run_checks
from src.pde.radial_heat import mc_vs_pde_check, radial_heat_solve
from src.sampling import laws
from src.sampling.estimate import MCEstimate
from src.sampling.rng import RngStream
from src.simulation import fk_mc
from src.simulation.halfspace_stable import cauchy_skeleton_sample, relativistic_clock_sample
from src.utils.config_loader import Settings, config_hash, load_settings
from src.utils.errors import ConfigError, DomainError, FkProbeError
from src.utils.logging_config import configure_logging, log_stage
from src.utils.serialization import emit, render_csv, render_json
from src.utils.telemetry import configure_tracing, traced

logger = logging.getLogger("fkprobe")


@dataclass
class Outcome:
    payload: Any
    header: Sequence[str] | None = None
    rows: list[Sequence[Any]] = field(default_factory=list)
    passed: bool | None = None
    default_format: str = "json"


@dataclass(frozen=True)
class Context:
    settings: Settings
    rng: RngStream
    workers: int

    @property
    def mc(self) -> dict[str, int]:
        return {"batch_size": self.settings.mc.batch_size, "workers": self.workers}


# --- command handlers -------------------------------------------------------------


def _zeros(params, ctx: Context) -> Outcome:
    zeros = bessel_j_zeros(params.mu, params.count)
    rows = [(k, float(z)) for k, z in enumerate(zeros, start=1)]
    return Outcome({"mu": params.mu, "zeros": zeros}, ("k", "zero"), rows, default_format="csv")


def _confine(params, ctx: Context) -> Outcome:
    ctl = SeriesCtl(**ctx.settings.series.model_dump())
    rows = []
    records = []
    passed = None
    for i, T in enumerate(params.T):
        for j, rho in enumerate(params.rho):
            series = confine_prob(params.N, rho, T, ctl)
            mc = None
            if params.mc_paths:
                mc = fk_mc.confinement_mc(params.N, rho, T, params.mc_paths, params.mc_steps, ctx.rng.derive(i).derive(j), **ctx.mc)
                agrees = mc.agrees_with(series.value, ctx.settings.mc.n_sigma)
                passed = agrees if passed is None else passed and agrees
            rows.append((params.N, rho, T, series.value, series.terms_used, series.tail_bound, mc.mean if mc else None, mc.std_err if mc else None))
            records.append({"N": params.N, "rho": rho, "T": T, "series": series, "mc": mc})
    header = ("N", "rho", "T", "value", "terms_used", "tail_bound", "mc_mean", "mc_std_err")
    return Outcome(records, header, rows, passed=passed, default_format="csv")


def _law_sample(params, ctx: Context) -> Outcome:
    gen = ctx.rng.generator()
    n = params.n
    if params.law == "subordinator":
        columns = {"T": laws.subordinator_sample(params.alpha, params.t, gen, n)}
    elif params.law == "hitting_time":
        columns = {"tau": laws.hitting_time_sample(params.a, gen, n)}
    elif params.law == "local_time":
        local_time, endpoint = laws.local_time_joint_sample(params.x, params.t, gen, n)
        columns = {"L": local_time, "endpoint": endpoint}
    elif params.law == "last_zero":
        gamma, meander = laws.last_zero_decomposition_sample(params.t, gen, n)
        columns = {"last_zero": gamma, "meander_endpoint": meander}
    elif params.law == "meander":
        columns = {"y": laws.meander_endpoint_sample(params.t, gen, n)}
    elif params.law == "relativistic_clock":
        columns = {"T": relativistic_clock_sample(params.m, params.t, gen, n)}
    elif params.law == "cauchy":
        endpoint = cauchy_skeleton_sample(params.N, (0.0, params.t), gen, n).endpoint
        columns = {f"x{k + 1}": endpoint[:, k] for k in range(params.N)}
    else:
        endpoint = fk_mc.stable_endpoint_sample(params.N, params.alpha, params.t, params.x, gen, n)
        columns = {f"x{k + 1}": endpoint[:, k] for k in range(params.N)}
    header = tuple(columns)
    rows = [tuple(float(v) for v in row) for row in zip(*columns.values())]
    summary = {name: MCEstimate.from_samples(values) for name, values in columns.items()}
    return Outcome({"law": params.law, "n": n, "summary": summary}, header, rows, default_format="csv")


def _checks(group: str) -> Callable[[Any, Context], Outcome]:
    def handler(params, ctx: Context) -> Outcome:
        options = CheckOptions(n_draws=params.n_draws, n_sigma=ctx.settings.mc.n_sigma, batch_size=ctx.settings.mc.batch_size, workers=ctx.workers)
        reports = run_checks(group, params.names, ctx.rng, options)
        rows = [(r.name, r.passed) for r in reports]
        return Outcome(reports, ("check", "passed"), rows, passed=all(r.passed for r in reports))

    return handler


def _constants(params, ctx: Context) -> Outcome:
    reports = [constant_report(N, alpha) for N in params.dims for alpha in params.alpha]
    return Outcome(reports, ConstantReport.CSV_HEADER, [r.csv_row() for r in reports], default_format="csv")


def _fk_run(params, ctx: Context) -> Outcome:
    kw = ctx.mc
    if params.setting in ("fullspace", "stable", "halfspace"):
        if params.setting == "fullspace":
            estimate = fk_mc.fk_fullspace(params.N, params.potential, params.initial, params.t, params.x, params.grid, ctx.rng, **kw)
        elif params.setting == "stable":
            estimate = fk_mc.fk_stable(params.N, params.alpha, params.potential, params.initial, params.t, params.x, params.grid, ctx.rng, **kw)
        else:
            estimate = fk_mc.fk_halfspace(params.N, params.potential, params.initial, params.t, params.x, params.grid, ctx.rng, **kw)
        try:
            position = threshold_position(params.setting, params.N, params.potential.c, getattr(params, "alpha", None))
        except DomainError:
            position = None
        return Outcome({"setting": params.setting, "estimate": estimate, "position": position})
    if params.setting == "bessel":
        pair = fk_mc.fk_radial_bessel(params.N, params.c, params.cap, params.initial, params.t, params.r0, params.grid, ctx.rng, **kw)
        passed = pair.agrees(ctx.settings.mc.n_sigma)
        return Outcome({"setting": "bessel", "coefficient": fk_mc.bessel_exponent_coefficient(params.N, params.c), **pair.to_dict()}, passed=passed)
    if params.setting == "confinement":
        mc = fk_mc.confinement_mc(params.N, params.rho, params.T, params.n_paths, params.n_steps, ctx.rng, **kw)
        series = confine_prob(params.N, params.rho, params.T, SeriesCtl(**ctx.settings.series.model_dump()))
        passed = mc.agrees_with(series.value, ctx.settings.mc.n_sigma)
        return Outcome({"setting": "confinement", "mc": mc, "series": series}, passed=passed)
    if params.setting == "event_rate":
        fit = fk_mc.event_rate_probe(params.N, params.geometry, params.t, params.x, params.n_list)
        payload = {"setting": "event_rate", **fit.to_dict()}
        if params.c is not None:
            payload["divergence_coefficient"] = fit.divergence_coefficient(params.c)
        return Outcome(payload)
    probe = fk_mc.boundary_In_probe(params.nu, params.t, params.x_N, params.geometry)
    return Outcome({"setting": "boundary", **probe.to_dict()}, passed=probe.value >= probe.bound)


def _pde_solve(params, ctx: Context) -> Outcome:
    grid = params.grid
    if "grid" not in params.model_fields_set:
        grid = grid.model_copy(update={"n_r": ctx.settings.pde.n_r, "n_t": ctx.settings.pde.n_t})
    field_ = radial_heat_solve(params.N, params.potential, params.initial, params.t, grid)
    rows = [(float(r), float(u)) for r, u in zip(field_.radii, field_.values)]
    payload: dict[str, Any] = {"r_max": field_.r_max, "n_r": field_.n_r, "t": field_.t, "boundary_mass": field_.boundary_mass}
    passed = None
    if params.compare is not None:
        comparison = mc_vs_pde_check(
            params.N,
            params.potential,
            params.initial,
            params.t,
            params.compare.x,
            params.compare.paths,
            ctx.rng,
            pde_grid=grid,
            n_sigma=ctx.settings.mc.n_sigma,
            **ctx.mc,
        )
        payload["comparison"] = comparison
        passed = comparison.passed
    else:
        payload["values"] = field_.values
    return Outcome(payload, ("r", "u"), rows, passed=passed, default_format="json" if params.compare else "csv")


def _sweep(params, ctx: Context) -> Outcome:
    report = fk_mc.threshold_sweep(
        params.setting,
        params.N,
        params.c_list,
        params.m_list,
        params.t,
        params.x,
        params.grid,
        ctx.rng,
        u0=params.initial,
        alpha=params.alpha,
        beta=params.beta,
        plateau_cutoff=params.plateau_cutoff or ctx.settings.sweep.plateau_cutoff,
        n_sigma=ctx.settings.mc.n_sigma,
        **ctx.mc,
    )
    return Outcome(report, report.CSV_HEADER, report.csv_rows(), default_format="csv")


HANDLERS: dict[str, Callable[[Any, Context], Outcome]] = {
    "zeros": _zeros,
    "confine": _confine,
    "law sample": _law_sample,
    "law check": _checks("law"),
    "appendix check": _checks("appendix"),
    "constants": _constants,
    "fk run": _fk_run,
    "pde solve": _pde_solve,
    "sweep": _sweep,
}

# commands whose outcome carries a table
TABULAR = frozenset(HANDLERS) - {"fk run"}


# --- running ------------------------------------------------------------------------


def run(config: ExperimentConfig, settings: Settings | None = None, workers: int | None = None) -> int:
    """Validate, execute and emit one experiment; returns the process exit code."""
    settings = settings or load_settings()
    try:
        params = PARAMS[config.command].validate_python(config.params)
    except ValidationError as exc:
        logger.error("invalid parameters for %s:\n%s", config.command, exc)
        return 2
    if config.format == "csv" and config.command not in TABULAR:
        raise DomainError(f"{config.command} has no tabular output; use --format json")
    record = {"command": config.command, "params": params.model_dump(mode="json")}
    digest = config_hash(record)
    ctx = Context(
        settings=settings,
        rng=RngStream(config.seed, zlib.crc32(config.command.encode("utf-8"))),
        workers=workers or settings.runtime.workers,
    )
    with log_stage(logger, config.command.replace(" ", "_"), seed=config.seed, config_hash=digest) as outcome_fields:
        with traced(f"fkprobe.{config.command.replace(' ', '_')}", announce=True, seed=config.seed, config_hash=digest):
            outcome = HANDLERS[config.command](params, ctx)
        outcome_fields["passed"] = outcome.passed
    fmt = config.format or outcome.default_format
    if fmt == "csv":
        if outcome.header is None:
            raise DomainError(f"{config.command} has no tabular output; use --format json")
        text = render_csv(outcome.header, outcome.rows, seed=config.seed, config_hash=digest)
    else:
        text = render_json(outcome.payload, seed=config.seed, config_hash=digest)
    out = None
    if config.out:
        out = Path(config.out)
        if not out.is_absolute() and out.parent == Path("."):
            out = Path(settings.runtime.output_dir) / out
    path = emit(text, out)
    if path is not None:
        logger.info("wrote %s", path)
    if outcome.passed is False:
        logger.error("%s: self-check failed", config.command)
        return 4
    return 0


def _float_list(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item.strip()]


def _int_list(text: str) -> list[int]:
    """'3..20' or '3,5,8'."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(item) for item in text.split(",") if item.strip()]


def _str_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _global_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="global seed (default FKPROBE_SEED or 20240611)")
    parent.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="worker processes for path batches")
    parent.add_argument("--out", default=argparse.SUPPRESS, help="output file; bare file names go to FKPROBE_OUTPUT_DIR; default stdout")
    parent.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS, help="output format (default per command)")
    parent.add_argument("--log-level", default=argparse.SUPPRESS, help="logging level (default FKPROBE_LOG_LEVEL or INFO)")
    parent.add_argument("--settings", default=argparse.SUPPRESS, help="JSON defaults file (default FKPROBE_CONFIG)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(prog="fkprobe", description="Feynman-Kac experiments with capped singular potentials.", parents=[common])
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, parent_parsers=None) -> argparse.ArgumentParser:
        target = parent_parsers if parent_parsers is not None else commands
        sub = target.add_parser(name, help=help_text, parents=[common])
        sub.add_argument("--config", help="JSON file with the command parameters")
        return sub

    zeros = add("zeros", "first positive zeros of J_mu")
    zeros.add_argument("--mu", type=float)
    zeros.add_argument("--count", type=int)

    confine = add("confine", "probability of staying in the unit ball")
    confine.add_argument("--N", dest="N", type=int)
    confine.add_argument("--rho", type=_float_list, help="comma separated start radii")
    confine.add_argument("--T", dest="T", type=_float_list, help="comma separated horizons")
    confine.add_argument("--mc-paths", dest="mc_paths", type=int, help="also run the random-walk oracle")
    confine.add_argument("--mc-steps", dest="mc_steps", type=int)

    law = commands.add_parser("law", help="exact samplers").add_subparsers(dest="action", required=True)
    sample = add("sample", "draw from a sampler", law)
    sample.add_argument("--law", choices=("subordinator", "hitting_time", "local_time", "last_zero", "meander", "relativistic_clock", "cauchy", "stable_endpoint"))
    sample.add_argument("--n", type=int)
    for name in ("alpha", "t", "a", "x", "m"):
        sample.add_argument(f"--{name}", type=float)
    sample.add_argument("--N", dest="N", type=int)
    law_check = add("check", "transform and KS checks of the samplers", law)
    law_check.add_argument("--names", type=_str_list, help="comma separated subset of checks")
    law_check.add_argument("--draws", dest="n_draws", type=int)

    appendix = commands.add_parser("appendix", help="time-change identities").add_subparsers(dest="action", required=True)
    check = add("check", "time-change and Laplace-identity checks", appendix)
    check.add_argument("--names", type=_str_list)
    check.add_argument("--draws", dest="n_draws", type=int)

    constants = add("constants", "threshold constants per dimension")
    constants.add_argument("--dims", type=_int_list, help="'3..20' or '3,4,5'")
    constants.add_argument("--alpha", type=_float_list, help="comma separated stability indices")

    fk = commands.add_parser("fk", help="Feynman-Kac experiments").add_subparsers(dest="action", required=True)
    add("run", "one experiment from a config file", fk)

    pde = commands.add_parser("pde", help="radial PDE reference").add_subparsers(dest="action", required=True)
    add("solve", "Crank-Nicolson solve from a config file", pde)

    add("sweep", "u_m over increasing caps from a config file")
    return parser


_RUN_OPTIONS = {"seed", "workers", "out", "format", "log_level", "settings", "command", "action", "config"}


def _read_params(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8-sig") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    data.pop("metadata", None)
    return data.get("params", data)


def config_from_args(args: argparse.Namespace, settings: Settings) -> ExperimentConfig:
    command = args.command if getattr(args, "action", None) is None else f"{args.command} {args.action}"
    params = _read_params(getattr(args, "config", None))
    params.update({key: value for key, value in vars(args).items() if key not in _RUN_OPTIONS and value is not None})
    return ExperimentConfig(
        command=command,
        params=params,
        seed=getattr(args, "seed", settings.runtime.seed),
        out=getattr(args, "out", None),
        format=getattr(args, "format", None),
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(getattr(args, "settings", None))
        configure_logging(getattr(args, "log_level", settings.runtime.log_level))
        configure_tracing(settings.runtime.applicationinsights_connection_string, settings.runtime.trace_console)
        config = config_from_args(args, settings)
        return run(config, settings, getattr(args, "workers", None))
    except ValidationError as exc:
        logger.error("invalid configuration:\n%s", exc)
        return 2
    except FkProbeError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except ValueError as exc:
        logger.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
