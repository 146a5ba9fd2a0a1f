"""Compact directed graphs with per-edge propagation probabilities.

Edges are stored in CSR order, sorted by ``(source, target)``. Node ids are
dense ``0..n-1``; when the input used sparse ids, ``labels[i]`` holds the
original id of node ``i``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import GenerationError, GraphFormatError, ProbabilityError

TRIVALENCY_LEVELS = (0.1, 0.01, 0.001)
BIVALENCY_BASE = (0.01, 0.001)
BIVALENCY_LEVELS = (1, 2, 4, 8, 16)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable directed graph in CSR form.

    ``indptr[u]:indptr[u+1]`` spans the out-edges of ``u``; ``indices`` holds
    their targets and ``probs`` their propagation probabilities.
    """

    node_count: int
    indptr: np.ndarray
    indices: np.ndarray
    probs: np.ndarray
    undirected: bool = False
    labels: np.ndarray | None = field(default=None, repr=False)

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0])

    @cached_property
    def sources(self) -> np.ndarray:
        return _readonly(np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self.indptr)))

    @cached_property
    def out_degree(self) -> np.ndarray:
        return _readonly(np.diff(self.indptr))

    @cached_property
    def in_degree(self) -> np.ndarray:
        return _readonly(np.bincount(self.indices, minlength=self.node_count).astype(np.int64))

    @cached_property
    def in_indptr(self) -> np.ndarray:
        ptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(self.in_degree, out=ptr[1:])
        return _readonly(ptr)

    @cached_property
    def in_edges(self) -> np.ndarray:
        """Edge ids grouped by target; ``in_edges[in_indptr[v]:in_indptr[v+1]]`` enter ``v``."""
        return _readonly(np.lexsort((self.sources, self.indices)).astype(np.int64))

    @cached_property
    def reverse_edge(self) -> np.ndarray:
        """For edge ``(u, v)`` the id of ``(v, u)``, or -1 when absent."""
        n = np.int64(self.node_count)
        keys = self.sources * n + self.indices
        query = self.indices.astype(np.int64) * n + self.sources
        pos = np.searchsorted(keys, query)
        pos_c = np.minimum(pos, max(self.edge_count - 1, 0))
        hit = (pos < self.edge_count) & (keys[pos_c] == query) if self.edge_count else pos.astype(bool)
        return _readonly(np.where(hit, pos_c, -1).astype(np.int64))

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Sparse influence matrix with ``A[u, v] = P_uv``."""
        return sp.csr_matrix(
            (self.probs, self.indices, self.indptr), shape=(self.node_count, self.node_count)
        )

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.sources.tolist(), self.indices.tolist(), self.probs.tolist()))

    def with_probabilities(self, probs: np.ndarray) -> Graph:
        probs = np.asarray(probs, dtype=np.float64)
        if probs.shape != self.probs.shape:
            raise ProbabilityError("probability vector does not match edge count")
        _check_probs(probs)
        return replace(self, probs=_readonly(probs.copy()))

    def label_of(self, node: int) -> int:
        return int(self.labels[node]) if self.labels is not None else int(node)

    def node_of(self, label: int) -> int:
        if self.labels is None:
            return int(label)
        i = int(np.searchsorted(self.labels, label))
        if i >= self.node_count or self.labels[i] != label:
            raise KeyError(label)
        return i


def _check_probs(p: np.ndarray) -> None:
    if p.size and (not np.all(np.isfinite(p)) or p.min() < 0.0 or p.max() > 1.0):
        bad = np.flatnonzero(~((p >= 0.0) & (p <= 1.0)))[0]
        raise ProbabilityError(f"edge {bad}: probability {p[bad]!r} outside [0, 1]")


def _edge_arrays(edges) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(edges, np.ndarray):
        arr = edges
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise GraphFormatError("edge array must have shape (m, 2) or (m, 3)")
        src = arr[:, 0].astype(np.int64)
        dst = arr[:, 1].astype(np.int64)
        p = arr[:, 2].astype(np.float64) if arr.shape[1] == 3 else np.ones(len(arr))
        if np.any(src < 0) or np.any(dst < 0):
            raise GraphFormatError("negative node id")
        return src, dst, p
    m = len(edges)
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    p = np.ones(m, dtype=np.float64)
    for i, e in enumerate(edges):
        if len(e) not in (2, 3):
            raise GraphFormatError(f"expected (u, v) or (u, v, p), got {e!r}", line=i + 1)
        u, v = e[0], e[1]
        if isinstance(u, bool) or isinstance(v, bool) or int(u) != u or int(v) != v or u < 0 or v < 0:
            raise GraphFormatError(f"node ids must be non-negative integers, got {e!r}", line=i + 1)
        src[i] = u
        dst[i] = v
        if len(e) == 3:
            pi = float(e[2])
            if not 0.0 <= pi <= 1.0:
                raise ProbabilityError(f"line {i + 1}: probability {pi!r} outside [0, 1]")
            p[i] = pi
    return src, dst, p


def build_graph(
    edges: Sequence[tuple] | np.ndarray,
    directed: bool = True,
    node_count: int | None = None,
    relabel: bool = False,
) -> Graph:
    """Build a :class:`Graph` from ``(u, v)`` or ``(u, v, p)`` records.

    Undirected input yields both ``(u, v)`` and ``(v, u)``. Self-loops are
    dropped and parallel edges merge by noisy-or, ``1 - prod(1 - p_i)``.
    Edges without an explicit probability get ``p = 1`` as a placeholder
    until :func:`assign_probabilities` is applied.

    With ``relabel=True`` the distinct ids are compacted to ``0..n-1`` in
    ascending order and the originals kept in ``Graph.labels``.
    """
    src, dst, p = _edge_arrays(edges)
    _check_probs(p)

    labels = None
    if relabel:
        labels, inv = np.unique(np.concatenate([src, dst]), return_inverse=True)
        src, dst = inv[: len(src)].astype(np.int64), inv[len(src) :].astype(np.int64)
        n = len(labels)
    else:
        n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
    if node_count is not None:
        if node_count < n:
            raise GraphFormatError(f"node_count={node_count} but ids reach {n - 1}")
        n = node_count

    keep = src != dst
    src, dst, p = src[keep], dst[keep], p[keep]
    if not directed:
        src, dst, p = np.concatenate([src, dst]), np.concatenate([dst, src]), np.concatenate([p, p])

    # sorting p within a duplicate group keeps the noisy-or product order-independent
    order = np.lexsort((p, dst, src))
    src, dst, p = src[order], dst[order], p[order]
    if len(src):
        first = np.ones(len(src), dtype=bool)
        first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
        starts = np.flatnonzero(first)
        if len(starts) < len(src):
            p = 1.0 - np.multiply.reduceat(1.0 - p, starts)
            src, dst = src[starts], dst[starts]

    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(
        node_count=n,
        indptr=_readonly(indptr),
        indices=_readonly(dst.astype(np.int32 if n < 2**31 else np.int64)),
        probs=_readonly(np.ascontiguousarray(p, dtype=np.float64)),
        undirected=not directed,
        labels=_readonly(labels) if labels is not None else None,
    )


# --------------------------------------------------------------------------
# probability models


@dataclass(frozen=True)
class ProbabilityModel:
    """Edge-probability assignment scheme.

    ``variant`` is one of ``"wc"``, ``"tr"``, ``"bivalency"``, ``"uniform"``
    or ``"file"`` (keep the probabilities already on the graph).
    """

    variant: str = "wc"
    level: int = 1
    p: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if self.variant not in ("wc", "tr", "bivalency", "uniform", "file"):
            raise ValueError(f"unknown probability model {self.variant!r}")
        if self.variant == "bivalency" and self.level not in BIVALENCY_LEVELS:
            raise ProbabilityError(f"bivalency level must be one of {BIVALENCY_LEVELS}, got {self.level}")
        if self.variant == "uniform" and not 0.0 <= self.p <= 1.0:
            raise ProbabilityError(f"uniform probability {self.p} outside [0, 1]")

    @classmethod
    def parse(cls, text: str, rng_seed: int = 0) -> ProbabilityModel:
        """Parse ``wc``, ``tr``, ``bivalency:<i>``, ``uniform:<p>`` or ``file``."""
        name, _, arg = text.strip().lower().partition(":")
        if name == "bivalency":
            return cls("bivalency", level=int(arg or 1), rng_seed=rng_seed)
        if name == "uniform":
            if not arg:
                raise ValueError("uniform model needs a probability, e.g. uniform:0.05")
            return cls("uniform", p=float(arg), rng_seed=rng_seed)
        return cls(name, rng_seed=rng_seed)

    def __str__(self) -> str:
        if self.variant == "bivalency":
            return f"bivalency:{self.level}"
        if self.variant == "uniform":
            return f"uniform:{self.p:g}"
        return self.variant


def assign_probabilities(g: Graph, model: ProbabilityModel) -> Graph:
    """Return a copy of ``g`` whose edge probabilities follow ``model``.

    Random models draw one value per edge in canonical edge order from a
    generator seeded with ``model.rng_seed``.
    """
    m = g.edge_count
    if model.variant == "file":
        return g
    if model.variant == "wc":
        probs = 1.0 / g.in_degree[g.indices].astype(np.float64)
    elif model.variant == "uniform":
        probs = np.full(m, model.p)
    else:
        rng = np.random.default_rng(model.rng_seed)
        levels = TRIVALENCY_LEVELS if model.variant == "tr" else tuple(model.level * b for b in BIVALENCY_BASE)
        probs = np.asarray(levels)[rng.integers(0, len(levels), size=m)]
    return g.with_probabilities(probs)


# --------------------------------------------------------------------------
# edge-list files


def load_snap_edgelist(path: str | os.PathLike) -> list[tuple]:
    """Parse a SNAP-style edge list.

    Lines are ``u v`` or ``u v p`` separated by tabs or spaces; blank lines
    and lines starting with ``#`` are skipped. Returns tuples in file order.
    """
    out: list[tuple] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"expected 2 or 3 fields, got {len(parts)}", line=lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"non-integer node id in {s!r}", line=lineno) from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative node id in {s!r}", line=lineno)
            if len(parts) == 3:
                try:
                    p = float(parts[2])
                except ValueError:
                    raise GraphFormatError(f"bad probability {parts[2]!r}", line=lineno) from None
                if not 0.0 <= p <= 1.0:
                    raise ProbabilityError(f"line {lineno}: probability {p!r} outside [0, 1]")
                out.append((u, v, p))
            else:
                out.append((u, v))
    return out


def write_edgelist(g: Graph, path: str | os.PathLike, with_probs: bool = True) -> None:
    """Write ``g`` as ``u v p`` lines (``u v`` when ``with_probs`` is false).

    Probabilities are written with ``repr`` so they round-trip exactly.
    """
    src = [g.label_of(u) for u in g.sources.tolist()] if g.labels is not None else g.sources.tolist()
    dst = [g.label_of(v) for v in g.indices.tolist()] if g.labels is not None else g.indices.tolist()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes: {g.node_count} edges: {g.edge_count}\n")
        if with_probs:
            fh.writelines(f"{u} {v} {p!r}\n" for u, v, p in zip(src, dst, g.probs.tolist()))
        else:
            fh.writelines(f"{u} {v}\n" for u, v in zip(src, dst))


def read_graph(path: str | os.PathLike, directed: bool = True, relabel: bool = False) -> tuple[Graph, bool]:
    """Load an edge-list file. Returns the graph and whether it carried probabilities."""
    records = load_snap_edgelist(path)
    widths = {len(r) for r in records}
    if len(widths) > 1:
        raise GraphFormatError("file mixes 2-column and 3-column lines")
    node_count = _header_node_count(path)
    g = build_graph(records, directed=directed, relabel=relabel,
                    node_count=None if relabel else node_count)
    return g, widths == {3}


def _header_node_count(path) -> int | None:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("# nodes:"):
        try:
            return int(first.split()[2])
        except (IndexError, ValueError):
            return None
    return None


# --------------------------------------------------------------------------
# synthetic generator


def _power_law_mean(xmin: float, xmax: float, gamma: float) -> float:
    def integral(a):  # antiderivative of x^(-a)
        if abs(a - 1.0) < 1e-12:
            return np.log(xmax) - np.log(xmin)
        return (xmax ** (1.0 - a) - xmin ** (1.0 - a)) / (1.0 - a)

    return integral(gamma - 1.0) / integral(gamma)


def _sample_power_law(rng, size, xmin, xmax, gamma):
    u = rng.random(size)
    if abs(gamma - 1.0) < 1e-12:
        return xmin * (xmax / xmin) ** u
    a, b = xmin ** (1.0 - gamma), xmax ** (1.0 - gamma)
    return (a - u * (a - b)) ** (1.0 / (1.0 - gamma))


def power_law_out_degrees(n: int, avg_degree: float, exponent: float, rng) -> np.ndarray:
    """Truncated power-law degree sequence on ``[xmin, n-1]`` summing to ``round(n * avg_degree)``."""
    dmax = n - 1
    total = int(round(n * avg_degree))
    if avg_degree > dmax:
        raise GenerationError(f"average degree {avg_degree} exceeds n-1={dmax}")
    if exponent <= 1.0:
        raise GenerationError(f"exponent must exceed 1, got {exponent}")
    if total == n * dmax:
        return np.full(n, dmax, dtype=np.int64)

    # bisection on the lower cutoff so that the continuous mean hits avg_degree
    lo, hi = 1e-9, float(dmax)
    if _power_law_mean(hi * (1 - 1e-12), hi, exponent) < avg_degree:
        raise GenerationError("degree sequence infeasible")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _power_law_mean(mid, dmax, exponent) < avg_degree:
            lo = mid
        else:
            hi = mid
    xmin = min(hi, dmax * (1 - 1e-12))
    deg = np.clip(np.rint(_sample_power_law(rng, n, xmin, dmax, exponent)), 0, dmax).astype(np.int64)

    # repair the total; proportional moves keep the tail shape
    for _ in range(10_000):
        diff = total - int(deg.sum())
        if diff == 0:
            return deg
        if diff > 0:
            w = (deg + 1.0) * (deg < dmax)
            pick = rng.choice(n, size=diff, p=w / w.sum())
            np.add.at(deg, pick, 1)
        else:
            w = deg * 1.0
            pick = rng.choice(n, size=-diff, p=w / w.sum())
            np.subtract.at(deg, pick, 1)
        np.clip(deg, 0, dmax, out=deg)
    raise GenerationError("could not match the requested edge total")


def generate_power_law(n: int, avg_degree: float, exponent: float = 2.5, rng_seed: int = 0) -> Graph:
    """Directed configuration-model graph with power-law out-degrees.

    Each node ``u`` draws an out-degree from a truncated power law and then
    picks that many distinct targets uniformly from ``V \\ {u}``. The result
    has exactly ``round(n * avg_degree)`` edges, all with placeholder
    probability 1, and is reproducible for a fixed ``rng_seed``.
    """
    if n < 2:
        raise GenerationError(f"need n >= 2, got {n}")
    if avg_degree < 1:
        raise GenerationError(f"need avg_degree >= 1, got {avg_degree}")
    rng = np.random.default_rng(rng_seed)
    deg = power_law_out_degrees(n, avg_degree, exponent, rng)

    dense = deg > (n - 1) // 2
    src_parts, dst_parts = [], []
    for u in np.flatnonzero(dense).tolist():
        t = rng.choice(n - 1, size=int(deg[u]), replace=False)
        src_parts.append(np.full(len(t), u, dtype=np.int64))
        dst_parts.append(t + (t >= u))

    src = np.repeat(np.arange(n, dtype=np.int64), np.where(dense, 0, deg))
    dst = rng.integers(0, n - 1, size=len(src))
    dst += dst >= src
    while len(src):
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        dup = np.zeros(len(src), dtype=bool)
        dup[1:] = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
        if not dup.any():
            break
        redraw = rng.integers(0, n - 1, size=int(dup.sum()))
        dst[dup] = redraw + (redraw >= src[dup])
    src = np.concatenate([src, *src_parts])
    dst = np.concatenate([dst, *dst_parts])
    return build_graph(np.stack([src, dst], axis=1), directed=True, node_count=n)
