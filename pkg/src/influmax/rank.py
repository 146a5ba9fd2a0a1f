"""Message-passing influence estimators.

Influence Propagation (IP) passes one message per directed edge and is exact
on trees. Influence Rank (IR) collapses the messages to one value per node,

    r(u) = 1 + alpha * sum_{v in out(u)} P_uv * r(v),

which is the linear system ``(I - alpha A) r = 1`` solved by Jacobi
iteration from ``r = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .graph import Graph
from .seeds import SeedSet

DEFAULT_ALPHA = 0.7
DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITERS = 20
OVERFLOW_GUARD = 1e12


@dataclass(frozen=True)
class DampedSystem:
    alpha: float = DEFAULT_ALPHA
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass(frozen=True)
class RankVector:
    r: np.ndarray
    iterations: int
    converged: bool


@dataclass(frozen=True)
class EdgeMessages:
    """``m[e]`` for edge ``e = (u, v)`` is the message ``m(v, u)``: the influence
    of ``v`` excluding the direction back towards ``u``."""

    m: np.ndarray
    iterations: int


def _guard(x: np.ndarray, alpha: float, it: int) -> None:
    top = float(np.max(x, initial=0.0))
    if not np.isfinite(top) or top > OVERFLOW_GUARD or not np.all(np.isfinite(x)):
        raise DivergenceError(alpha, it, top)


def _check_alpha(alpha: float) -> None:
    # alpha = 1 is allowed so that the undamped equations stay reachable
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


def iterate_rank(
    g: Graph,
    alpha: float,
    damp: np.ndarray | None = None,
    start: np.ndarray | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> RankVector:
    """Jacobi iteration of ``r <- damp * (1 + alpha * A r)``.

    Stops once the max-norm change drops below ``tol`` or after
    ``max_iters`` sweeps. ``damp`` defaults to all ones.
    """
    _check_alpha(alpha)
    A = g.matrix
    r = np.ones(g.node_count) if start is None else np.array(start, dtype=np.float64)
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        nxt = 1.0 + alpha * (A @ r)
        if damp is not None:
            nxt = damp * nxt
        _guard(nxt, alpha, it)
        delta = float(np.max(np.abs(nxt - r), initial=0.0))
        r = nxt
        if delta < tol:
            converged = True
            break
    return RankVector(r, it, converged)


def influence_rank_scores(
    g: Graph, alpha: float = DEFAULT_ALPHA, max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL
) -> RankVector:
    if g.node_count == 0:
        raise ValueError("graph is empty")
    return iterate_rank(g, alpha, max_iters=max_iters, tol=tol)


def influence_propagation(
    g: Graph, alpha: float = 1.0, max_iters: int = 100, tol: float = 1e-12
) -> tuple[EdgeMessages, RankVector]:
    """Edge-level message passing; returns the messages and per-node estimates.

    With ``alpha = 1`` on a graph whose underlying undirected graph is a
    forest, the estimates equal the exact single-seed spreads once the
    iteration reaches the tree depth.
    """
    if g.node_count == 0:
        raise ValueError("graph is empty")
    _check_alpha(alpha)
    n = g.node_count
    src = g.sources
    dst = g.indices
    p = g.probs
    rev = g.reverse_edge
    has_rev = rev >= 0
    rev_i = np.where(has_rev, rev, 0)

    msg = np.ones(g.edge_count)
    it = 0
    converged = False
    for it in range(1, max_iters + 1):
        flow = p * msg
        total = np.bincount(src, weights=flow, minlength=n)
        # message into u along (u, v): v's outgoing flow minus what goes back to u
        back = np.where(has_rev, flow[rev_i], 0.0)
        nxt = 1.0 + alpha * (total[dst] - back)
        _guard(nxt, alpha, it)
        delta = float(np.max(np.abs(nxt - msg), initial=0.0))
        msg = nxt
        if delta < tol:
            converged = True
            break
    sigma = 1.0 + np.bincount(src, weights=p * msg, minlength=n)
    return EdgeMessages(msg, it), RankVector(sigma, it, converged)


def top_k(scores: np.ndarray, k: int, exclude: np.ndarray | None = None) -> np.ndarray:
    """Indices of the ``k`` largest scores, ties to the smaller id."""
    n = len(scores)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    keys = -np.asarray(scores, dtype=np.float64)
    if exclude is not None:
        keys = np.where(exclude, np.inf, keys)
    return np.lexsort((np.arange(n), keys))[:k]


def select_top_k_ir(
    g: Graph,
    k: int,
    alpha: float = DEFAULT_ALPHA,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> SeedSet:
    if not 1 <= k <= g.node_count:
        raise ValueError(f"k must lie in [1, {g.node_count}], got {k}")
    rv = influence_rank_scores(g, alpha, max_iters, tol)
    chosen = top_k(rv.r, k)
    return SeedSet(chosen.tolist(), rv.r[chosen].tolist(), algorithm="ir")
