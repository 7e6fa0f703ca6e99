"""Deterministic seed derivation for parallel replica streams.

Every stochastic routine in the package takes an explicit 64-bit master
seed; worker streams are derived from (master, label, index) with a
splitmix64 hash chain, so results are reproducible and independent of
how replicas are scheduled across threads.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(state: int) -> int:
    """One splitmix64 step; returns the mixed output for ``state + golden``."""
    with np.errstate(over="ignore"):
        z = np.uint64(state) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return int(z ^ (z >> np.uint64(31)))


def _mix_in(state: int, word: int) -> int:
    with np.errstate(over="ignore"):
        s = np.uint64(state) ^ (np.uint64(word) * _MIX1)
    return splitmix64(int(s))


def child_seed(master: int, *path) -> int:
    """Derive a child seed from a master seed and a label path.

    Path components may be ints or short strings. The derivation is a
    pure hash: same (master, path) always gives the same child, and
    distinct paths give (with overwhelming probability) distinct streams.
    """
    s = splitmix64(master)
    for part in path:
        if isinstance(part, str):
            for b in part.encode():
                s = _mix_in(s, b)
            s = _mix_in(s, 0xFF)
        else:
            s = _mix_in(s, int(part) & 0xFFFFFFFFFFFFFFFF)
    return s


def rng_from(master: int, *path) -> np.random.Generator:
    """numpy Generator on a Philox stream keyed by the derived child seed."""
    return np.random.Generator(np.random.Philox(key=child_seed(master, *path)))
