"""
Seedable Random Streams
=======================
Counter-based (Philox) streams keyed by (seed, stream_id). A coverage cell
gives simulation i the stream (cell_seed, i), so results do not depend on
which worker ran which simulation.
"""

from typing import Optional

import numpy as np

UINT64_MASK = (1 << 64) - 1


class RngStream:
    """
    One reproducible stream of random draws.

    Two RngStream objects built from the same (seed, stream_id) produce the
    same sequence; distinct stream_ids are independent Philox keys derived
    through numpy's SeedSequence spawn tree.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be nonnegative")
        self.seed = int(seed) & UINT64_MASK
        self.stream_id = int(stream_id) & UINT64_MASK
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def standard_normal(self, size=None) -> np.ndarray:
        return self.generator.standard_normal(size)

    def uniform(self, size=None) -> np.ndarray:
        return self.generator.random(size)

    def chisquare(self, df, size=None) -> np.ndarray:
        return self.generator.chisquare(df, size)

    def spawn(self, stream_id: int) -> "RngStream":
        """A sibling stream sharing this stream's seed."""
        return RngStream(self.seed, stream_id)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def derive_seed(master_seed: int, *indices: int) -> int:
    """
    Deterministic 64-bit child seed for a tuple of indices.

    Used to give every (prior index, grid index) cell of a campaign its own
    seed, so a single cell can be rerun in isolation.
    """
    sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(i) for i in indices))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def as_stream(rng: Optional[object], default_seed: int = 0) -> RngStream:
    """Accept an RngStream, an int seed, or None."""
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream(default_seed)
    return RngStream(int(rng))
