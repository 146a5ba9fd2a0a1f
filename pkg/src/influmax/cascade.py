"""Monte-Carlo simulation of the IC and IC-N diffusion processes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np
from numba import njit

from .errors import ProbabilityError, SeedError
from .graph import Graph
from .rng import MASK64, RngStream, aux_next, aux_state, edge_coin, run_key

DEFAULT_RUNS = 10_000

POSITIVE = 1
NEGATIVE = 2


@dataclass(frozen=True)
class IC:
    """Independent Cascade model."""

    def __str__(self) -> str:
        return "ic"


@dataclass(frozen=True)
class ICN:
    """IC with negative opinions. ``q`` is the quality factor; ``lam`` weights
    negative spread in the net objective ``sigma_P - lam * sigma_N``."""

    q: float = 0.9
    lam: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ProbabilityError(f"quality factor q={self.q} outside [0, 1]")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")

    def __str__(self) -> str:
        return f"icn:q={self.q:g},lambda={self.lam:g}"


Diffusion = Union[IC, ICN]


@dataclass(frozen=True)
class CascadeOutcome:
    activated: frozenset[int]
    positive: frozenset[int] = frozenset()
    negative: frozenset[int] = frozenset()


@dataclass(frozen=True)
class SpreadEstimate:
    """Sample mean and standard error of the spread over ``runs`` cascades.

    For IC-N, ``mean`` counts every activated node and the positive/negative
    split is reported separately.
    """

    mean: float
    std_error: float
    runs: int
    mean_positive: float | None = None
    mean_negative: float | None = None
    std_error_positive: float | None = None
    std_error_negative: float | None = None
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)


def check_seeds(g: Graph, seeds: Iterable[int]) -> np.ndarray:
    arr = np.asarray(list(seeds), dtype=np.int64)
    if arr.size == 0:
        raise SeedError("seed set is empty")
    if arr.min() < 0 or arr.max() >= g.node_count:
        bad = arr[(arr < 0) | (arr >= g.node_count)][0]
        raise SeedError(f"seed {bad} out of range for a graph with {g.node_count} nodes")
    if len(np.unique(arr)) != len(arr):
        raise SeedError("seed set contains duplicates")
    return arr


# --------------------------------------------------------------------------
# kernels
#
# ``mark[v] == tick`` means v is active in the current run; ticks are never
# reused, so the marker arrays need no reset between runs.


@njit(cache=True)
def _ic_run(indptr, indices, probs, seeds, key, mark, tick, order):
    c = 0
    for s in seeds:
        mark[s] = tick
        order[c] = s
        c += 1
    lo = 0
    while lo < c:
        hi = c
        for i in range(lo, hi):
            u = order[i]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if mark[v] != tick and edge_coin(key, e) < probs[e]:
                    mark[v] = tick
                    order[c] = v
                    c += 1
        lo = hi
    return c


@njit(cache=True)
def _icn_run(indptr, indices, sources, probs, seeds, q, key, mark, cmark, tick, order, state, head, link, buf):
    """One IC-N cascade. Returns ``(activated, positive, negative, tick)``.

    ``state`` receives POSITIVE/NEGATIVE for each node in ``order[:activated]``.
    """
    aux = aux_state(key)
    run_tick = tick
    tick += 1
    c = 0
    npos = 0
    for s in seeds:
        mark[s] = run_tick
        order[c] = s
        aux, x = aux_next(aux)
        if x < q:
            state[s] = 1
            npos += 1
        else:
            state[s] = 2
        c += 1
    lo = 0
    cands = np.empty(0, dtype=np.int64)
    while lo < c:
        hi = c
        step = tick
        tick += 1
        ncand = 0
        # gather, per neutral node, the edges from nodes activated last step
        for i in range(lo, hi):
            u = order[i]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if mark[v] == run_tick:
                    continue
                if cmark[v] != step:
                    cmark[v] = step
                    head[v] = -1
                    if ncand == cands.shape[0]:
                        grown = np.empty(max(16, 2 * ncand), dtype=np.int64)
                        grown[:ncand] = cands[:ncand]
                        cands = grown
                    cands[ncand] = v
                    ncand += 1
                link[e] = head[v]
                head[v] = e
        for j in range(ncand):
            v = cands[j]
            m = 0
            e = head[v]
            while e != -1:
                buf[m] = e
                m += 1
                e = link[e]
            # Fisher-Yates over the activating in-edges
            for i in range(m - 1, 0, -1):
                aux, x = aux_next(aux)
                r = int(x * (i + 1))
                t = buf[i]
                buf[i] = buf[r]
                buf[r] = t
            for i in range(m):
                e = buf[i]
                if edge_coin(key, e) < probs[e]:
                    w = sources[e]
                    mark[v] = run_tick
                    order[c] = v
                    c += 1
                    if state[w] == 2:
                        state[v] = 2
                    else:
                        aux, x = aux_next(aux)
                        if x < q:
                            state[v] = 1
                            npos += 1
                        else:
                            state[v] = 2
                    break
        lo = hi
    return c, npos, c - npos, tick


@njit(cache=True)
def _ic_batch(indptr, indices, probs, seeds, base_seed, runs, n):
    mark = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    out = np.empty(runs, dtype=np.int64)
    for j in range(runs):
        out[j] = _ic_run(indptr, indices, probs, seeds, run_key(base_seed, j), mark, j + 1, order)
    return out


@njit(cache=True)
def _icn_batch(indptr, indices, sources, probs, seeds, q, base_seed, runs, n, m):
    mark = np.zeros(n, dtype=np.int64)
    cmark = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    state = np.zeros(n, dtype=np.int8)
    head = np.empty(n, dtype=np.int64)
    link = np.empty(max(m, 1), dtype=np.int64)
    buf = np.empty(max(m, 1), dtype=np.int64)
    pos = np.empty(runs, dtype=np.int64)
    neg = np.empty(runs, dtype=np.int64)
    tick = 1
    for j in range(runs):
        _, p, ng, tick = _icn_run(indptr, indices, sources, probs, seeds, q, run_key(base_seed, j),
                                  mark, cmark, tick, order, state, head, link, buf)
        pos[j] = p
        neg[j] = ng
    return pos, neg


# --------------------------------------------------------------------------
# public API


def simulate_ic(g: Graph, seeds: Iterable[int], stream: RngStream) -> CascadeOutcome:
    """Run one IC cascade from ``seeds`` using the coins of ``stream``."""
    s = check_seeds(g, seeds)
    mark = np.zeros(g.node_count, dtype=np.int64)
    order = np.empty(g.node_count, dtype=np.int64)
    c = _ic_run(g.indptr, g.indices, g.probs, s, stream.key, mark, 1, order)
    return CascadeOutcome(activated=frozenset(order[:c].tolist()))


def simulate_icn(g: Graph, seeds: Iterable[int], q: float, stream: RngStream) -> CascadeOutcome:
    """Run one IC-N cascade with quality factor ``q``.

    Each neutral node tries its just-activated in-neighbours in a uniformly
    random order; the first successful trial fixes its opinion.
    """
    if not 0.0 <= q <= 1.0:
        raise ProbabilityError(f"quality factor q={q} outside [0, 1]")
    s = check_seeds(g, seeds)
    n, m = g.node_count, g.edge_count
    mark = np.zeros(n, dtype=np.int64)
    cmark = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    state = np.zeros(n, dtype=np.int8)
    c, _, _, _ = _icn_run(g.indptr, g.indices, g.sources, g.probs, s, float(q), stream.key, mark, cmark, 1,
                          order, state, np.empty(n, dtype=np.int64),
                          np.empty(max(m, 1), dtype=np.int64), np.empty(max(m, 1), dtype=np.int64))
    act = order[:c]
    st = state[act]
    return CascadeOutcome(
        activated=frozenset(act.tolist()),
        positive=frozenset(act[st == POSITIVE].tolist()),
        negative=frozenset(act[st == NEGATIVE].tolist()),
    )


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    runs = len(x)
    mean = float(x.sum()) / runs
    if runs < 2:
        return mean, 0.0
    var = float(((x - mean) ** 2).sum()) / (runs - 1)
    return mean, math.sqrt(var / runs)


def estimate_spread(
    g: Graph,
    seeds: Iterable[int],
    model: Diffusion | None = None,
    runs: int = DEFAULT_RUNS,
    base_seed: int = 0,
    keep_samples: bool = False,
) -> SpreadEstimate:
    """Monte-Carlo spread estimate; run ``j`` uses stream ``(base_seed, j)``."""
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    model = model or IC()
    s = check_seeds(g, seeds)
    key = np.uint64(base_seed & MASK64)
    if isinstance(model, ICN):
        pos, neg = _icn_batch(g.indptr, g.indices, g.sources, g.probs, s, float(model.q), key, runs,
                              g.node_count, g.edge_count)
        total = pos + neg
        mean, se = _mean_se(total)
        mp, sep = _mean_se(pos)
        mn, sen = _mean_se(neg)
        return SpreadEstimate(mean, se, runs, mp, mn, sep, sen,
                              samples=np.stack([pos, neg], axis=1) if keep_samples else None)
    counts = _ic_batch(g.indptr, g.indices, g.probs, s, key, runs, g.node_count)
    mean, se = _mean_se(counts)
    return SpreadEstimate(mean, se, runs, samples=counts if keep_samples else None)
