"""Exact influence oracles for tiny graphs.

``exact_activation_probs`` enumerates live-edge worlds lazily: only edges
that leave the currently reached set towards an unreached node are branched
on, and every other edge marginalises out. The result is the same sum over
all ``2^|E|`` live-edge subsets, computed over far fewer branches.

``exact_sigma_icn`` expands the IC-N process tree step by step, averaging
over every activation order of each neutral node's activators.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable

import numpy as np

from .cascade import check_seeds
from .errors import InstanceTooLarge
from .graph import Graph

MAX_EDGES = 25
MAX_ICN_NODES = 16


def _reachable(g: Graph, seeds: Iterable[int]) -> set[int]:
    seen = set(seeds)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for e in range(g.indptr[u], g.indptr[u + 1]):
            if g.probs[e] > 0 and int(g.indices[e]) not in seen:
                seen.add(int(g.indices[e]))
                stack.append(int(g.indices[e]))
    return seen


def relevant_edges(g: Graph, seeds: Iterable[int]) -> list[int]:
    """Edges whose state can influence the cascade from ``seeds``."""
    seeds = set(seeds)
    reach = _reachable(g, seeds)
    return [
        e
        for u in sorted(reach)
        for e in range(g.indptr[u], g.indptr[u + 1])
        if g.probs[e] > 0 and int(g.indices[e]) not in seeds
    ]


def exact_activation_probs(g: Graph, seeds: Iterable[int], max_edges: int = MAX_EDGES) -> np.ndarray:
    """Exact probability that each node ends up active under IC."""
    s = [int(x) for x in check_seeds(g, seeds)]
    n_rel = len(relevant_edges(g, s))
    if n_rel > max_edges:
        raise InstanceTooLarge(f"{n_rel} relevant edges exceeds the enumeration cap of {max_edges}")

    indptr = g.indptr.tolist()
    dst = g.indices.tolist()
    prob = g.probs.tolist()
    out_edges = [tuple(e for e in range(indptr[u], indptr[u + 1]) if prob[e] > 0) for u in range(g.node_count)]
    acc = [0.0] * g.node_count

    def walk(reached: int, pending: tuple, i: int, w: float) -> None:
        while i < len(pending) and (reached >> dst[pending[i]]) & 1:
            i += 1
        if i == len(pending):
            bits = reached
            while bits:
                low = bits & -bits
                acc[low.bit_length() - 1] += w
                bits ^= low
            return
        e = pending[i]
        p = prob[e]
        v = dst[e]
        walk(reached | (1 << v), pending + out_edges[v], i + 1, w * p)
        if p < 1.0:
            walk(reached, pending, i + 1, w * (1.0 - p))

    start = 0
    for x in s:
        start |= 1 << x
    walk(start, tuple(e for x in s for e in out_edges[x]), 0, 1.0)
    return np.asarray(acc)


def exact_sigma(g: Graph, seeds: Iterable[int], max_edges: int = MAX_EDGES) -> float:
    """Exact expected IC spread of ``seeds``."""
    return float(math.fsum(exact_activation_probs(g, seeds, max_edges)))


def exact_sigma_icn(
    g: Graph, seeds: Iterable[int], q: float, max_edges: int = MAX_EDGES
) -> tuple[float, float]:
    """Exact expected ``(positive, negative)`` spread under IC-N."""
    s = [int(x) for x in check_seeds(g, seeds)]
    n_rel = len(relevant_edges(g, s))
    if n_rel > max_edges or g.node_count > MAX_ICN_NODES:
        raise InstanceTooLarge(
            f"IC-N oracle supports <= {MAX_ICN_NODES} nodes and <= {max_edges} relevant edges"
        )
    n = g.node_count
    in_lists: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for u, v, p in g.edges():
        if p > 0:
            in_lists[v].append((u, p))

    totals = [0.0, 0.0]

    def outcome_dist(state, frontier_set, v):
        """Distribution over v's state after one step: {0: neutral, 1: +, 2: -}."""
        acts = [(u, p) for u, p in in_lists[v] if u in frontier_set]
        if not acts:
            return None
        dist = {0: 0.0, 1: 0.0, 2: 0.0}
        perms = list(itertools.permutations(acts))
        share = 1.0 / len(perms)
        for perm in perms:
            miss = 1.0
            for u, p in perm:
                hit = miss * p
                if state[u] == 2:
                    dist[2] += share * hit
                else:
                    dist[1] += share * hit * q
                    dist[2] += share * hit * (1.0 - q)
                miss *= 1.0 - p
            dist[0] += share * miss
        return [(k, w) for k, w in dist.items() if w > 0.0]

    def expand(state: list[int], frontier: list[int], w: float) -> None:
        if not frontier:
            totals[0] += w * state.count(1)
            totals[1] += w * state.count(2)
            return
        fset = set(frontier)
        cands, dists = [], []
        for v in range(n):
            if state[v] == 0:
                d = outcome_dist(state, fset, v)
                if d is not None:
                    cands.append(v)
                    dists.append(d)
        for combo in itertools.product(*dists):
            nxt = list(state)
            newly = []
            cw = w
            for v, (k, p) in zip(cands, combo):
                cw *= p
                if k:
                    nxt[v] = k
                    newly.append(v)
            if cw > 0.0:
                expand(nxt, newly, cw)

    for signs in itertools.product((1, 2), repeat=len(s)):
        w = 1.0
        state = [0] * n
        for x, sg in zip(s, signs):
            w *= q if sg == 1 else 1.0 - q
            state[x] = sg
        if w > 0.0:
            expand(state, list(s), w)
    return totals[0], totals[1]


def optimal_seed_set(g: Graph, k: int, objective) -> tuple[tuple[int, ...], float]:
    """Brute-force the best size-``k`` seed set under ``objective(seeds)``."""
    best, best_val = None, -math.inf
    for combo in itertools.combinations(range(g.node_count), k):
        val = objective(combo)
        if val > best_val:
            best, best_val = combo, val
    return best, best_val
