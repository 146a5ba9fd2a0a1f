"""Comparison selectors: degree, weighted PageRank, and CELF greedy."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .cascade import DEFAULT_RUNS, IC, ICN, Diffusion, estimate_spread
from .exact import exact_sigma, exact_sigma_icn
from .graph import Graph
from .rank import RankVector, top_k
from .seeds import SeedSet

# marginal gains are compared after rounding to this many decimals so that
# float noise in exact differences cannot split genuine ties
GAIN_DECIMALS = 9


def _check_k(g: Graph, k: int) -> None:
    if not 1 <= k <= g.node_count:
        raise ValueError(f"k must lie in [1, {g.node_count}], got {k}")


def select_degree(g: Graph, k: int) -> SeedSet:
    """Top-``k`` nodes by out-degree (in + out for undirected input)."""
    _check_k(g, k)
    deg = g.out_degree + g.in_degree if g.undirected else g.out_degree
    chosen = top_k(deg.astype(np.float64), k)
    return SeedSet(chosen.tolist(), deg[chosen].astype(float).tolist(), algorithm="degree")


@dataclass(frozen=True)
class PageRankConfig:
    jump: float = 0.15
    tol: float = 1e-12
    max_iters: int = 1000

    def __post_init__(self):
        if not 0.0 < self.jump < 1.0:
            raise ValueError(f"jump must lie in (0, 1), got {self.jump}")


def pagerank_scores(g: Graph, cfg: PageRankConfig | None = None) -> RankVector:
    """Weighted PageRank on reversed influence edges.

    A walker at ``u`` steps to in-neighbour ``v`` with probability
    ``P_vu / sum_w P_wu``; with probability ``jump`` it teleports uniformly.
    Nodes without weighted in-edges spread their mass uniformly.
    """
    cfg = cfg or PageRankConfig()
    n = g.node_count
    if n == 0:
        raise ValueError("graph is empty")
    insum = np.bincount(g.indices, weights=g.probs, minlength=n)
    dangling = insum <= 0.0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, insum))
    A = g.matrix
    pr = np.full(n, 1.0 / n)
    it, converged = 0, False
    for it in range(1, cfg.max_iters + 1):
        nxt = (1.0 - cfg.jump) * (A @ (pr * inv) + pr[dangling].sum() / n) + cfg.jump / n
        nxt /= nxt.sum()
        delta = float(np.max(np.abs(nxt - pr)))
        pr = nxt
        if delta < cfg.tol:
            converged = True
            break
    return RankVector(pr, it, converged)


def select_pagerank(g: Graph, k: int, cfg: PageRankConfig | None = None) -> SeedSet:
    _check_k(g, k)
    rv = pagerank_scores(g, cfg)
    chosen = top_k(rv.r, k)
    return SeedSet(chosen.tolist(), rv.r[chosen].tolist(), algorithm="pagerank")


# --------------------------------------------------------------------------
# greedy


@dataclass(frozen=True)
class MonteCarlo:
    runs: int = DEFAULT_RUNS
    seed: int = 0


@dataclass(frozen=True)
class Exact:
    pass


Evaluator = Union[MonteCarlo, Exact]


def make_objective(g: Graph, model: Diffusion, evaluator: Evaluator) -> Callable[[Sequence[int]], float]:
    """Spread function of a seed set (net spread for IC-N).

    Monte-Carlo evaluation reuses the same base seed for every call, so all
    candidate sets are scored on the same sampled worlds.
    """
    icn = isinstance(model, ICN)

    def f(seeds: Sequence[int]) -> float:
        if len(seeds) == 0:
            return 0.0
        if isinstance(evaluator, Exact):
            if icn:
                pos, neg = exact_sigma_icn(g, seeds, model.q)
                return pos - model.lam * neg
            return exact_sigma(g, seeds)
        est = estimate_spread(g, seeds, model, evaluator.runs, evaluator.seed)
        if icn:
            return est.mean_positive - model.lam * est.mean_negative
        return est.mean

    return f


class CelfQueue:
    """Max-queue of ``(cached gain, node, round stamp)``; ties pop the smaller id."""

    def __init__(self):
        self._heap: list[tuple[float, int, int]] = []

    def push(self, node: int, gain: float, stamp: int) -> None:
        heapq.heappush(self._heap, (-round(gain, GAIN_DECIMALS), node, stamp))

    def pop(self) -> tuple[int, float, int]:
        neg, node, stamp = heapq.heappop(self._heap)
        return node, -neg, stamp

    def __len__(self) -> int:
        return len(self._heap)


def greedy_celf(
    g: Graph,
    k: int,
    model: Diffusion | None = None,
    evaluator: Evaluator | None = None,
    objective: Callable[[Sequence[int]], float] | None = None,
) -> SeedSet:
    """Greedy hill climbing with lazy-forward re-evaluation.

    A popped node whose cached gain was computed against the current seed
    set is selected; otherwise its gain is refreshed and it is pushed back.
    """
    _check_k(g, k)
    f = objective or make_objective(g, model or IC(), evaluator or MonteCarlo())
    seeds: list[int] = []
    current = 0.0
    value: dict[int, float] = {}
    queue = CelfQueue()
    for u in range(g.node_count):
        value[u] = f([u])
        queue.push(u, value[u], 0)
    out = SeedSet(seeds, [], algorithm="celf")
    for rnd in range(k):
        while True:
            u, gain, stamp = queue.pop()
            if stamp == rnd:
                break
            value[u] = f(seeds + [u])
            queue.push(u, value[u] - current, rnd)
        seeds.append(u)
        out.scores.append(value[u] - current)
        current = value[u]
    return out


def greedy_plain(
    g: Graph,
    k: int,
    model: Diffusion | None = None,
    evaluator: Evaluator | None = None,
    objective: Callable[[Sequence[int]], float] | None = None,
) -> SeedSet:
    """Non-lazy greedy: every remaining node is re-scored each round."""
    _check_k(g, k)
    f = objective or make_objective(g, model or IC(), evaluator or MonteCarlo())
    seeds: list[int] = []
    current = 0.0
    out = SeedSet(seeds, [], algorithm="greedy")
    for _ in range(k):
        best, best_gain, best_val = -1, -np.inf, 0.0
        for u in range(g.node_count):
            if u in seeds:
                continue
            val = f(seeds + [u])
            gain = round(val - current, GAIN_DECIMALS)
            if gain > best_gain:
                best, best_gain, best_val = u, gain, val
        seeds.append(best)
        out.scores.append(best_val - current)
        current = best_val
    return out
