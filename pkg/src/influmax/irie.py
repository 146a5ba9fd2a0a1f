"""IRIE: influence ranking interleaved with influence estimation.

Each greedy round estimates ``AP_S(u)``, the probability that ``u`` is
already activated by the current seeds, and iterates

    r(u) = (1 - AP_S(u)) * (1 + alpha * sum_v P_uv * r(v))

so that ``r`` approximates the marginal gain of adding ``u``. The node with
the largest ``r`` joins the seed set. IRIE-N runs the same loop on the
coupled ``(g_pos, g_neg, h)`` system of the IC-N model.

Activation probabilities come from maximum-influence out-arborescences: for
each seed, the best single path to every node, pruned below ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
from numba import njit

from .errors import ProbabilityError, SeedError
from .graph import Graph
from .rank import DEFAULT_ALPHA, DEFAULT_MAX_ITERS, DEFAULT_TOL, _check_alpha, _guard, iterate_rank
from .seeds import SeedSet

THETA_IC = 1.0 / 320
THETA_ICN = 1.0 / 160
WARM_ITERS = 5


@dataclass(frozen=True)
class MioaTree:
    """Maximum-probability-path arborescence rooted at ``root``.

    ``nodes[i]`` is reached with path probability ``prob[i]`` through
    ``parent[i]`` (-1 for the root). Nodes appear in settling order.
    """

    root: int
    theta: float
    nodes: np.ndarray
    prob: np.ndarray
    parent: np.ndarray

    @property
    def reached(self) -> dict[int, tuple[float, int]]:
        return {
            int(v): (float(p), int(w))
            for v, p, w in zip(self.nodes.tolist(), self.prob.tolist(), self.parent.tolist())
        }


@njit(cache=True, inline="always")
def _before(ka, na, kb, nb):
    # heap order: larger probability first, then smaller node id
    return ka > kb or (ka == kb and na < nb)


@njit(cache=True)
def _mioa_kernel(indptr, indices, probs, s, theta, n):
    best = np.zeros(n)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    order = np.empty(16, dtype=np.int64)
    hk = np.empty(16)
    hn = np.empty(16, dtype=np.int64)
    size = 1
    hk[0] = 1.0
    hn[0] = s
    best[s] = 1.0
    count = 0
    while size > 0:
        pu = hk[0]
        u = hn[0]
        size -= 1
        hk[0] = hk[size]
        hn[0] = hn[size]
        i = 0
        while True:  # sift down
            l = 2 * i + 1
            if l >= size:
                break
            c = l
            if l + 1 < size and _before(hk[l + 1], hn[l + 1], hk[l], hn[l]):
                c = l + 1
            if _before(hk[c], hn[c], hk[i], hn[i]):
                hk[i], hk[c] = hk[c], hk[i]
                hn[i], hn[c] = hn[c], hn[i]
                i = c
            else:
                break
        if done[u] or pu < best[u]:
            continue
        done[u] = True
        if count == order.shape[0]:
            grown = np.empty(2 * count, dtype=np.int64)
            grown[:count] = order
            order = grown
        order[count] = u
        count += 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            pe = probs[e]
            if pe <= 0.0 or done[v]:
                continue
            pv = pu * pe
            if pv < theta:
                continue
            if pv > best[v] or (pv == best[v] and u < parent[v]):
                best[v] = pv
                parent[v] = u
                if size == hk.shape[0]:
                    gk = np.empty(2 * size)
                    gn = np.empty(2 * size, dtype=np.int64)
                    gk[:size] = hk
                    gn[:size] = hn
                    hk = gk
                    hn = gn
                j = size
                hk[j] = pv
                hn[j] = v
                size += 1
                while j > 0:  # sift up
                    p = (j - 1) // 2
                    if _before(hk[j], hn[j], hk[p], hn[p]):
                        hk[j], hk[p] = hk[p], hk[j]
                        hn[j], hn[p] = hn[p], hn[j]
                        j = p
                    else:
                        break
    nodes = order[:count].copy()
    return nodes, best[nodes], parent[nodes]


def compute_mioa(g: Graph, s: int, theta: float = THETA_IC) -> MioaTree:
    """Dijkstra on ``-log P`` from ``s``, keeping paths with probability >= ``theta``.

    The search runs directly on path products, which orders nodes the same
    way. Equal-probability paths resolve towards the smaller parent id.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if not 0 <= s < g.node_count:
        raise SeedError(f"node {s} out of range")
    nodes, prob, parent = _mioa_kernel(g.indptr, g.indices, g.probs, int(s), float(theta), g.node_count)
    return MioaTree(root=int(s), theta=theta, nodes=nodes, prob=prob, parent=parent)


@dataclass(frozen=True)
class ActivationProb:
    ap: np.ndarray
    seeds: tuple[int, ...]


class ApEstimator(Protocol):
    """Incremental activation-probability estimator used by the selection loops."""

    def add_seed(self, s: int) -> np.ndarray:
        """Register ``s`` as a seed and return the updated AP vector."""
        ...


class MioaEstimator:
    """Sums per-seed MIOA path probabilities, clamped to 1; seeds pinned at 1.

    Only the newest seed's arborescence is computed on each call.
    """

    def __init__(self, g: Graph, theta: float = THETA_IC):
        self.g = g
        self.theta = theta
        self.raw = np.zeros(g.node_count)
        self.seeds: list[int] = []

    def add_seed(self, s: int) -> np.ndarray:
        tree = compute_mioa(self.g, s, self.theta)
        np.add.at(self.raw, tree.nodes, tree.prob)
        self.seeds.append(s)
        ap = np.minimum(self.raw, 1.0)
        ap[self.seeds] = 1.0
        return ap


def estimate_ap(g: Graph, seeds: Sequence[int], theta: float = THETA_IC) -> ActivationProb:
    """``AP_S(u) = min(1, sum_s AP_s(u))`` over the seeds' MIOA trees."""
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise SeedError("seed set is empty")
    est = MioaEstimator(g, theta)
    ap = None
    for s in seeds:
        ap = est.add_seed(s)
    return ActivationProb(ap, tuple(seeds))


def _check_k(g: Graph, k: int) -> None:
    if not 1 <= k <= g.node_count:
        raise ValueError(f"k must lie in [1, {g.node_count}], got {k}")


def _pick(scores: np.ndarray, chosen: np.ndarray) -> int:
    # np.argmax returns the first maximum, i.e. the smallest id among ties
    return int(np.argmax(np.where(chosen, -np.inf, scores)))


def irie_select(
    g: Graph,
    k: int,
    alpha: float = DEFAULT_ALPHA,
    theta: float = THETA_IC,
    tol: float = DEFAULT_TOL,
    first_iters: int = DEFAULT_MAX_ITERS,
    later_iters: int = WARM_ITERS,
    warm_start: bool = True,
    estimator: ApEstimator | None = None,
) -> SeedSet:
    """Select ``k`` seeds with IRIE.

    Round one starts from ``r = 1`` and runs up to ``first_iters`` sweeps.
    Later rounds restart from the previous ``r`` with at most ``later_iters``
    sweeps; ``warm_start=False`` instead restarts cold with ``first_iters``.
    """
    _check_k(g, k)
    _check_alpha(alpha)
    est = estimator if estimator is not None else MioaEstimator(g, theta)
    n = g.node_count
    ap = np.zeros(n)
    chosen = np.zeros(n, dtype=bool)
    r = None
    out = SeedSet([], [], algorithm="irie")
    for rnd in range(k):
        if rnd == 0 or not warm_start:
            rv = iterate_rank(g, alpha, damp=1.0 - ap, max_iters=first_iters, tol=tol)
        else:
            rv = iterate_rank(g, alpha, damp=1.0 - ap, start=r, max_iters=later_iters, tol=tol)
        r = rv.r
        u = _pick(r, chosen)
        chosen[u] = True
        out.seeds.append(u)
        out.scores.append(float(r[u]))
        out.iterations.append(rv.iterations)
        if rnd + 1 < k:
            ap = est.add_seed(u)
    return out


@dataclass(frozen=True)
class IcnRankTriple:
    gP: np.ndarray
    gN: np.ndarray
    h: np.ndarray
    q: float
    lam: float
    iterations: int = 0
    converged: bool = False

    @property
    def net(self) -> np.ndarray:
        return self.gP - self.lam * self.gN


def iterate_icn(
    g: Graph,
    q: float,
    lam: float = 0.0,
    alpha: float = DEFAULT_ALPHA,
    ap: np.ndarray | None = None,
    start: IcnRankTriple | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> IcnRankTriple:
    """Jacobi iteration of the IC-N system for a fixed AP vector.

    Starts from ``g_pos = q``, ``g_neg = 1 - q``, ``h = 1`` unless ``start``
    is given; every update reads the previous sweep's values.
    """
    if not 0.0 <= q <= 1.0:
        raise ProbabilityError(f"quality factor q={q} outside [0, 1]")
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    _check_alpha(alpha)
    n = g.node_count
    A = g.matrix
    d = np.ones(n) if ap is None else 1.0 - ap
    dq = d * q
    if start is None:
        gp, gn, h = np.full(n, float(q)), np.full(n, 1.0 - q), np.ones(n)
    else:
        gp, gn, h = start.gP.copy(), start.gN.copy(), start.h.copy()
    it = 0
    converged = False
    for it in range(1, max_iters + 1):
        gp_new = dq * (1.0 + alpha * (A @ gp))
        gn_new = d * ((1.0 - q) + alpha * (A @ ((1.0 - q) * h + q * gn)))
        h_new = d * (1.0 + alpha * (A @ h))
        for x in (gp_new, gn_new, h_new):
            _guard(x, alpha, it)
        delta = max(
            float(np.max(np.abs(gp_new - gp), initial=0.0)),
            float(np.max(np.abs(gn_new - gn), initial=0.0)),
            float(np.max(np.abs(h_new - h), initial=0.0)),
        )
        gp, gn, h = gp_new, gn_new, h_new
        if delta < tol:
            converged = True
            break
    return IcnRankTriple(gp, gn, h, q, lam, it, converged)


def irie_n_select(
    g: Graph,
    k: int,
    q: float = 0.9,
    lam: float = 0.0,
    alpha: float = DEFAULT_ALPHA,
    theta: float = THETA_ICN,
    tol: float = DEFAULT_TOL,
    first_iters: int = DEFAULT_MAX_ITERS,
    later_iters: int = WARM_ITERS,
    warm_start: bool = True,
    estimator: ApEstimator | None = None,
) -> SeedSet:
    """Select ``k`` seeds maximising the estimated net gain ``g_pos - lam * g_neg``."""
    _check_k(g, k)
    est = estimator if estimator is not None else MioaEstimator(g, theta)
    n = g.node_count
    ap = np.zeros(n)
    chosen = np.zeros(n, dtype=bool)
    tri = None
    out = SeedSet([], [], algorithm="irie-n")
    for rnd in range(k):
        if rnd == 0 or not warm_start:
            tri = iterate_icn(g, q, lam, alpha, ap, max_iters=first_iters, tol=tol)
        else:
            tri = iterate_icn(g, q, lam, alpha, ap, start=tri, max_iters=later_iters, tol=tol)
        score = tri.net
        u = _pick(score, chosen)
        chosen[u] = True
        out.seeds.append(u)
        out.scores.append(float(score[u]))
        out.iterations.append(tri.iterations)
        if rnd + 1 < k:
            ap = est.add_seed(u)
    return out
