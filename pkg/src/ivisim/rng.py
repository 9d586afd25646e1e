"""Reproducible random number streams.

Every source of randomness in the package comes from a PCG64DXSM generator
seeded through ``numpy.random.SeedSequence`` on a (seed, domain,
stream-or-chunk index) key, so a draw is a pure function of that identity.
Path results therefore never depend on thread scheduling or on how many
paths run alongside.
"""
from __future__ import annotations

import numpy as np

# Domain tags keep the per-path streams, their orthogonal (price-layer)
# companions and the batch-engine chunk streams disjoint in seed space.
DOMAIN_PATH = 0
DOMAIN_PATH_ORTHO = 1
DOMAIN_CHUNK = 2
DOMAIN_CHUNK_ORTHO = 3


def _make_generator(entropy: tuple[int, ...]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64DXSM(np.random.SeedSequence(list(entropy))))


class RngStream:
    """Random stream for a single simulated path.

    The same ``(seed, stream_id)`` pair always reproduces the identical draw
    sequence; distinct ``stream_id`` values give statistically independent
    streams.  The orthogonal sub-stream feeds the price-layer Gaussians and is
    keyed separately, so consuming it never perturbs the variance-path draws.
    """

    __slots__ = ("seed", "stream_id", "_gen", "_ortho")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._gen = _make_generator((self.seed, DOMAIN_PATH, self.stream_id))
        self._ortho: np.random.Generator | None = None

    def normal(self) -> float:
        return float(self._gen.standard_normal())

    def uniform(self) -> float:
        return float(self._gen.random())

    def orthogonal_normal(self) -> float:
        if self._ortho is None:
            self._ortho = _make_generator((self.seed, DOMAIN_PATH_ORTHO, self.stream_id))
        return float(self._ortho.standard_normal())

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


# Lane width of the vectorised engine.  Each chunk of CHUNK_LANES path slots
# owns its own pair of streams and always generates full-width draw blocks,
# so path draws are independent of the total path count and of the thread
# count.  16384 keeps the step working set inside L2; changing this value
# changes every simulated number.
CHUNK_LANES = 16384


def chunk_generator(entropy: tuple[int, ...], chunk_index: int) -> np.random.Generator:
    """Variance-stream generator for one chunk of the batch engine."""
    return _make_generator(tuple(entropy) + (DOMAIN_CHUNK, int(chunk_index)))


def chunk_orthogonal_generator(entropy: tuple[int, ...], chunk_index: int) -> np.random.Generator:
    """Price-layer generator for one chunk; independent of the variance stream."""
    return _make_generator(tuple(entropy) + (DOMAIN_CHUNK_ORTHO, int(chunk_index)))
