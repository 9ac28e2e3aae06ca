"""Deterministic random-stream derivation.

Every stochastic operation in this package draws from numpy's PCG64
generator, seeded through a SeedSequence built from the caller's root
seed plus an integer path.  The path starts with a stream tag naming
the consumer, so independent pieces of a computation (per-day counts,
per-step chain fits, per-candidate utility draws) get statistically
independent substreams that do not depend on evaluation order.

Derivation rule, used everywhere::

    SeedSequence(entropy=[root, tag, *path])

Reproducing any artifact therefore needs only the root seed and the
documented path, never the order in which work was scheduled.
"""
from __future__ import annotations

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Tags that keep substreams of one root seed from colliding."""

    SIMULATE = 1
    DAY_COUNT = 2
    FIT = 3
    SCORE = 4
    PREDICT = 5
    UTILITY = 6
    REFIT = 7
    ANNEAL = 8
    ANNEAL_ENERGY = 9
    REPLICATE = 10
    FREQUENCY = 11


def seed_sequence(root: int, *path: int) -> np.random.SeedSequence:
    parts = [int(root)] + [int(p) for p in path]
    for p in parts:
        if p < 0:
            raise ValueError(f"seed path entries must be non-negative, got {p}")
    return np.random.SeedSequence(entropy=parts)


def spawn_rng(root: int, *path: int) -> np.random.Generator:
    """Generator for the substream at ``path`` under ``root``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(root, *path)))
