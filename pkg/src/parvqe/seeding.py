"""Deterministic RNG stream derivation.

All randomness in this package flows through generators created here. A
stream is identified by an integer path (base seed plus context indices),
so results never depend on global RNG state, call order across tasks, or
the number of worker threads.
"""

from __future__ import annotations

import numpy as np


def derive_rng(*keys: int) -> np.random.Generator:
    """Return a generator for the stream identified by the key path."""
    return np.random.default_rng(list(keys))


def derive_seed(*keys: int) -> int:
    """Fold a key path into a single 64-bit seed (for nested jobs)."""
    ss = np.random.SeedSequence(list(keys))
    return int(ss.generate_state(1, np.uint64)[0])
