"""Runtime settings: environment (.env aware) layered over the JSON defaults file.

Environment variables:
    FKPROBE_SEED          - Optional. Global seed (default 20240611).
    FKPROBE_WORKERS       - Optional. Worker processes for path batches (default 1).
    FKPROBE_OUTPUT_DIR    - Optional. Where result files go (default ./results).
    FKPROBE_LOG_LEVEL     - Optional. Logging level name (default INFO).
    FKPROBE_CONFIG        - Optional. Path of the JSON defaults file (default experiment-config.json).
    FKPROBE_TRACE_CONSOLE - Optional. "1" exports spans to the console.
    APPLICATIONINSIGHTS_CONNECTION_STRING - Optional. Enables Azure Monitor span export.
"""

from __future__ import annotations

import hashlib
import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Annotated, Any, Mapping

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.utils.errors import ConfigError

DEFAULT_SEED = 20240611
DEFAULT_CONFIG_FILE = "experiment-config.json"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SeriesSettings(_Section):
    eps_tail: Annotated[float, Field(gt=0.0, description="Absolute tail tolerance of eigen-series")] = 1e-14
    k_max: Annotated[int, Field(ge=1, description="Hard cap on series terms")] = 2000
    t_min: Annotated[float, Field(gt=0.0, description="Smallest time the series is trusted at")] = 1e-3


class MonteCarloSettings(_Section):
    batch_size: Annotated[int, Field(ge=1, description="Paths per batch; fixes the merge partition")] = 8192
    n_sigma: Annotated[float, Field(gt=0.0, description="Standard errors allowed by MC checks")] = 3.0


class SweepSettings(_Section):
    plateau_cutoff: Annotated[float, Field(gt=1.0, description="Ratio u_2m/u_m below which a row is a plateau")] = 1.05


class HartmanWatsonSettings(_Section):
    tol: Annotated[float, Field(gt=0.0, description="Absolute tolerance of the theta quadrature")] = 1e-9


class PdeSettings(_Section):
    n_r: Annotated[int, Field(ge=16)] = 801
    n_t: Annotated[int, Field(ge=4)] = 400


class RuntimeSettings(_Section):
    seed: Annotated[int, Field(ge=0, lt=2**64)] = DEFAULT_SEED
    workers: Annotated[int, Field(ge=1)] = 1
    output_dir: str = "results"
    log_level: str = "INFO"
    trace_console: bool = False
    applicationinsights_connection_string: str = ""


class Settings(_Section):
    runtime: RuntimeSettings = RuntimeSettings()
    series: SeriesSettings = SeriesSettings()
    mc: MonteCarloSettings = MonteCarloSettings()
    sweep: SweepSettings = SweepSettings()
    hartman_watson: HartmanWatsonSettings = HartmanWatsonSettings()
    pde: PdeSettings = PdeSettings()


def _read_json(path: Path) -> dict[str, Any]:
    try:
        with path.open(encoding="utf-8-sig") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    data.pop("metadata", None)
    return data


def _environment_overrides() -> dict[str, Any]:
    runtime: dict[str, Any] = {}
    env = {
        "seed": os.environ.get("FKPROBE_SEED"),
        "workers": os.environ.get("FKPROBE_WORKERS"),
        "output_dir": os.environ.get("FKPROBE_OUTPUT_DIR"),
        "log_level": os.environ.get("FKPROBE_LOG_LEVEL"),
        "applicationinsights_connection_string": os.environ.get("APPLICATIONINSIGHTS_CONNECTION_STRING"),
    }
    for key, value in env.items():
        if value:
            runtime[key] = value
    if os.environ.get("FKPROBE_TRACE_CONSOLE", "") == "1":
        runtime["trace_console"] = True
    return runtime


def load_settings(config_path: str | os.PathLike[str] | None = None) -> Settings:
    """Build settings from the defaults file and the environment (environment wins)."""
    load_dotenv()
    path = Path(config_path or os.environ.get("FKPROBE_CONFIG", DEFAULT_CONFIG_FILE))
    data: dict[str, Any] = _read_json(path) if path.is_file() else {}
    if config_path is not None and not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    runtime = dict(data.get("runtime", {}))
    runtime.update(_environment_overrides())
    data["runtime"] = runtime
    try:
        return Settings.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


def canonical_json(payload: BaseModel | Mapping[str, Any]) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(payload: BaseModel | Mapping[str, Any]) -> str:
    """sha256 of the canonical JSON form; stable across runs and platforms."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
