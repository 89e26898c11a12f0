"""Counter-based random streams.

A stream is named by (seed, stream_id) plus an optional derivation path, and
always rebuilds the same Philox generator: identical names give identical
draws, distinct names are independent through ``SeedSequence`` spawning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.utils.errors import DomainError

_U64 = 2**64


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for value in (self.seed, self.stream_id, *self.path):
            if int(value) != value or not 0 <= value < _U64:
                raise DomainError(f"stream coordinates must be 64-bit unsigned integers, got {value!r}")

    def derive(self, child: int) -> "RngStream":
        """Independent sub-stream, e.g. one per path batch."""
        return RngStream(self.seed, self.stream_id, (*self.path, int(child)))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id), *self.path))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed_sequence()))

    def describe(self) -> dict[str, object]:
        return {"seed": self.seed, "stream_id": self.stream_id, "path": list(self.path)}


RngLike = RngStream | np.random.Generator


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError(f"expected an RngStream or numpy Generator, got {type(rng).__name__}")


def open_uniform(gen: np.random.Generator, size) -> np.ndarray:
    """Uniform draws on the open interval (0, 1)."""
    u = gen.random(size)
    # random() is on [0, 1); map the single excluded endpoint away
    return np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
