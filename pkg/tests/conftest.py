import json

import pytest

from src.sampling.rng import RngStream
from src.simulation.models import InitialDatum, PathGrid
from src.utils.config_loader import Settings

SEED = 20240611


@pytest.fixture
def rng() -> RngStream:
    return RngStream(SEED)


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def gaussian_bump() -> InitialDatum:
    return InitialDatum(kind="gaussian_bump", radius=1.0)


@pytest.fixture
def short_grid() -> PathGrid:
    return PathGrid(t_end=0.5, dt=0.05, n_paths=20_000)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Isolated working directory with an empty defaults file."""
    monkeypatch.chdir(tmp_path)
    for name in ("FKPROBE_SEED", "FKPROBE_WORKERS", "FKPROBE_OUTPUT_DIR", "FKPROBE_LOG_LEVEL", "FKPROBE_CONFIG", "FKPROBE_TRACE_CONSOLE"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.delenv("APPLICATIONINSIGHTS_CONNECTION_STRING", raising=False)
    (tmp_path / "experiment-config.json").write_text(json.dumps({"runtime": {"output_dir": str(tmp_path / "results")}}))
    return tmp_path
