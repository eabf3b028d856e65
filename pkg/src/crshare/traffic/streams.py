"""Seeded random streams, one per (purpose, provider).

Every stochastic decision of a run draws from its own
``numpy.random.Generator``, derived from the scenario seed through a
``SeedSequence`` spawn key. Adding a draw to one stream (for instance a
sensing-error flip) never shifts the numbers seen by another, so two
scenarios that differ only in sharing policy still see the same
arrivals and holding times.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class Purpose(IntEnum):
    RATES = 0
    ARRIVALS = 1
    HOLDING = 2
    CELL_PICK = 3
    SENSING = 4


class RngStreams:
    """Lazily created generators keyed by ``(purpose, provider)``."""

    def __init__(self, seed: int) -> None:
        self._seed = seed
        self._streams: dict[tuple[int, int], np.random.Generator] = {}

    @property
    def seed(self) -> int:
        return self._seed

    def get(self, purpose: Purpose, provider: int = 0) -> np.random.Generator:
        key = (int(purpose), provider)
        rng = self._streams.get(key)
        if rng is None:
            seq = np.random.SeedSequence(self._seed, spawn_key=key)
            rng = np.random.default_rng(seq)
            self._streams[key] = rng
        return rng


def derive_seed(master: int, index: int) -> int:
    """Seed of replication *index* under *master*; stable across releases."""
    seq = np.random.SeedSequence(master, spawn_key=(0xC0FFEE, index))
    return int(seq.generate_state(1, dtype=np.uint32)[0])
