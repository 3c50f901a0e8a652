"""Named deterministic random streams backed by counter-based Philox generators.

Every stochastic component draws from its own stream identified by a seed and
a label path, so consuming one stream can never perturb another and runs are
reproducible regardless of evaluation order or parallelism.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_key(*labels: object) -> tuple[int, ...]:
    """Map a label path to a stable spawn key (one 32-bit word per label)."""
    return tuple(
        int.from_bytes(hashlib.sha256(repr(label).encode("utf-8")).digest()[:4], "big")
        for label in labels
    )


def stream(seed: int, *labels: object) -> np.random.Generator:
    """Return an independent generator for (seed, *labels).

    The same seed and label path always yields an identical stream; distinct
    label paths yield independent streams.
    """
    seq = np.random.SeedSequence(seed, spawn_key=derive_key(*labels))
    return np.random.Generator(np.random.Philox(seq))


def child_seed(seed: int, *labels: object) -> int:
    """Derive a deterministic integer sub-seed for (seed, *labels)."""
    seq = np.random.SeedSequence(seed, spawn_key=derive_key(*labels))
    return int(seq.generate_state(2, np.uint32).view(np.uint64)[0] >> 1)
