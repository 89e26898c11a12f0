"""Monte Carlo estimates with mergeable second moments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, NamedTuple

import numpy as np

from src.utils.errors import DomainError


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error.

    ``m2`` is the centred sum of squares, which makes ``merge`` exact
    (Chan et al. pairwise update). ``seed`` records the stream provenance.
    """

    mean: float
    std_err: float
    n: int
    m2: float = 0.0
    seed: dict[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def from_samples(cls, values: np.ndarray, seed: dict[str, Any] | None = None) -> "MCEstimate":
        values = np.asarray(values, dtype=float).ravel()
        n = values.size
        if n == 0:
            raise DomainError("cannot estimate from zero samples")
        mean = float(np.mean(values))
        centred = values - mean
        m2 = float(np.dot(centred, centred))
        return cls(mean=mean, std_err=_std_err(m2, n), n=n, m2=m2, seed=dict(seed or {}))

    def merge(self, other: "MCEstimate") -> "MCEstimate":
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return MCEstimate(mean=mean, std_err=_std_err(m2, n), n=n, m2=m2, seed=self.seed)

    def scaled(self, factor: float) -> "MCEstimate":
        return replace(self, mean=self.mean * factor, std_err=self.std_err * abs(factor), m2=self.m2 * factor * factor)

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    def interval(self, n_sigma: float = 3.0) -> tuple[float, float]:
        return self.mean - n_sigma * self.std_err, self.mean + n_sigma * self.std_err

    def agrees_with(self, value: float, n_sigma: float = 3.0, rel: float = 0.0) -> bool:
        return abs(self.mean - value) <= max(n_sigma * self.std_err, rel * abs(value))

    def to_dict(self) -> dict[str, Any]:
        return {"mean": self.mean, "std_err": self.std_err, "n": self.n, "seed": self.seed}


def _std_err(m2: float, n: int) -> float:
    if n < 2:
        return 0.0
    return math.sqrt(max(m2, 0.0) / (n - 1) / n)


def merge_all(estimates: Iterable[MCEstimate]) -> MCEstimate:
    """Left fold of ``merge`` in the given order (callers pass batch-id order)."""
    iterator = iter(estimates)
    try:
        total = next(iterator)
    except StopIteration:
        raise DomainError("nothing to merge") from None
    for estimate in iterator:
        total = total.merge(estimate)
    return total


def z_score(a: MCEstimate, b: MCEstimate) -> float:
    """|a - b| in units of the combined standard error of two independent estimates."""
    combined = math.hypot(a.std_err, b.std_err)
    diff = abs(a.mean - b.mean)
    if combined == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / combined


class EstimatePair(NamedTuple):
    """Two independent estimates of the same quantity."""

    lhs: MCEstimate
    rhs: MCEstimate

    @property
    def z(self) -> float:
        return z_score(self.lhs, self.rhs)

    def agrees(self, n_sigma: float = 3.0, rel: float = 0.0) -> bool:
        combined = math.hypot(self.lhs.std_err, self.rhs.std_err)
        return abs(self.lhs.mean - self.rhs.mean) <= max(n_sigma * combined, rel * abs(self.rhs.mean))

    def to_dict(self) -> dict[str, Any]:
        return {"lhs": self.lhs.to_dict(), "rhs": self.rhs.to_dict(), "z": self.z}
