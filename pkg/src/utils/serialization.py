"""Result emission. Every file carries the config hash and the seed."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import BaseModel


def to_json_primitive(obj: Any) -> Any:
    if obj is None or isinstance(obj, (str, bool, int)):
        return obj
    if isinstance(obj, float):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.generic):
        return to_json_primitive(obj.item())
    if isinstance(obj, np.ndarray):
        return [to_json_primitive(item) for item in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_json_primitive(item) for item in obj]
    if isinstance(obj, dict):
        return {str(key): to_json_primitive(value) for key, value in obj.items()}
    if isinstance(obj, BaseModel):
        return to_json_primitive(obj.model_dump(mode="json"))
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {field.name: to_json_primitive(getattr(obj, field.name)) for field in dataclasses.fields(obj)}
    for method in ("to_dict", "as_dict"):
        if hasattr(obj, method):
            return to_json_primitive(getattr(obj, method)())
    return str(obj)


def render_json(payload: Any, *, seed: int, config_hash: str) -> str:
    document = {"config_hash": config_hash, "seed": seed, "result": to_json_primitive(payload)}
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], *, seed: int, config_hash: str) -> str:
    buffer = io.StringIO()
    buffer.write(f"# config_hash={config_hash}\n")
    buffer.write(f"# seed={seed}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if value is None else (repr(float(value)) if isinstance(value, (float, np.floating)) else value) for value in row])
    return buffer.getvalue()


def read_csv_rows(text: str) -> list[dict[str, str]]:
    """Parse a file written by ``render_csv`` (comment lines skipped)."""
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))


def emit(text: str, out: str | Path | None) -> Path | None:
    if out is None:
        print(text, end="")
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path
