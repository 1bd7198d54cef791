"""Keyed random streams.

Every draw in a run comes from a generator keyed by ``(seed, round, purpose)``,
so adding draws to one sampler never shifts the numbers seen by another and
different selectors see the same network randomness (common random numbers).
"""

from __future__ import annotations

import numpy as np

TOPOLOGY = 0
MOBILITY = 1
CHANNEL = 2
ROUND_STATE = 3
SGHS = 4
BASELINE = 5
THETA = 6


def stream(seed: int, round_index: int, purpose: int) -> np.random.Generator:
    """Independent generator for one (seed, round, purpose) key."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(round_index), int(purpose)))
    return np.random.default_rng(ss)


def derive_seed(seed: int, round_index: int, purpose: int) -> int:
    """A 63-bit integer seed derived from a stream key (for APIs that take ints)."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(round_index), int(purpose)))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
