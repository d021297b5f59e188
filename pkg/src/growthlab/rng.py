"""Reproducible random streams.

A stream is the pair ``(seed, stream_id)``.  Both halves go into the 128-bit
key of a Philox counter-based generator, so every stream is an independent
sequence that can be recreated from its two integers alone.  Monte Carlo
loops give sample ``i`` the stream ``base + i``; the result then does not
depend on how samples are split between workers.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeededStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= _MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        key = int(self.seed) | (int(self.stream_id) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset):
        """Stream ``stream_id + offset`` under the same seed."""
        return SeededStream(self.seed, (self.stream_id + int(offset)) & _MASK64)


def as_generator(rng):
    """Accept a SeededStream, a numpy Generator, or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, SeededStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return SeededStream(int(rng)).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")
