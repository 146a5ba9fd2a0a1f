"""Counter-based random streams keyed by ``(base_seed, run index)``.

Every Monte-Carlo run gets a 64-bit key. Edge coins are a pure function of
``(key, edge id)`` so a run's live-edge world does not depend on the order
in which edges are examined; auxiliary draws (seed opinions, permutations)
come from a separate SplitMix64 sequence derived from the same key. Runs are
therefore reproducible regardless of how they are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_AUX = np.uint64(0xD1B54A32D192ED03)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def to_unit(z):
    return np.float64(z >> _S11) * _INV53


@njit(cache=True)
def run_key(base_seed, run):
    return mix64(mix64(np.uint64(base_seed) + _GOLDEN) + (np.uint64(run) + _ONE) * _GOLDEN)


@njit(cache=True, inline="always")
def edge_coin(key, e):
    """Uniform [0, 1) draw for edge ``e`` in the run keyed by ``key``."""
    return to_unit(mix64(key + (np.uint64(e) + _ONE) * _GOLDEN))


@njit(cache=True, inline="always")
def aux_state(key):
    return mix64(key ^ _AUX)


@njit(cache=True, inline="always")
def aux_next(state):
    """Advance a SplitMix64 state; returns ``(new_state, uniform)``."""
    state = state + _GOLDEN
    return state, to_unit(mix64(state))


@dataclass(frozen=True)
class RngStream:
    """Random stream for run ``index`` of an experiment seeded with ``base_seed``."""

    base_seed: int
    index: int = 0

    @property
    def key(self) -> np.uint64:
        return np.uint64(run_key(np.uint64(self.base_seed & MASK64), np.uint64(self.index & MASK64)))
