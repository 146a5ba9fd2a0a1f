"""Experiment specs, result records and sweep execution."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import os
import resource
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable

from .baselines import MonteCarlo, greedy_celf, select_degree, select_pagerank
from .cascade import IC, ICN, estimate_spread
from .errors import InfluMaxError, SeedError
from .graph import Graph, ProbabilityModel, assign_probabilities, generate_power_law, read_graph
from .irie import THETA_IC, THETA_ICN, irie_n_select, irie_select
from .rank import select_top_k_ir
from .seeds import SeedSet

log = logging.getLogger(__name__)

ALGORITHMS = ("degree", "pagerank", "ir", "irie", "irie-n", "celf")
SCHEMA_VERSION = 1


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce one selection (and optional evaluation)."""

    graph: str | None = None
    generator: dict | None = None
    directed: bool = True
    relabel: bool = False
    model: str = "wc"
    algo: str = "irie"
    k: int = 50
    alpha: float = 0.7
    theta: float | None = None
    q: float = 0.9
    lam: float = 0.0
    diffusion: str = "ic"
    runs: int = 10_000
    celf_runs: int = 10_000
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGORITHMS)}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.diffusion not in ("ic", "icn"):
            raise ValueError(f"diffusion must be 'ic' or 'icn', got {self.diffusion!r}")

    @property
    def diffusion_model(self):
        return ICN(self.q, self.lam) if self.diffusion == "icn" or self.algo == "irie-n" else IC()

    @property
    def resolved_theta(self) -> float:
        if self.theta is not None:
            return self.theta
        return THETA_ICN if self.algo == "irie-n" else THETA_IC

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown spec keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class ResultRecord:
    algorithm: str
    graph: str
    model: str
    k: int
    diffusion: str = "ic"
    spread_mean: float | None = None
    spread_std_error: float | None = None
    positive_mean: float | None = None
    negative_mean: float | None = None
    select_ms: float | None = None
    peak_rss_bytes: int | None = None
    seeds: list[int] = field(default_factory=list)
    error: str = ""
    schema: int = SCHEMA_VERSION

    @staticmethod
    def header() -> list[str]:
        return [f.name for f in fields(ResultRecord)]

    def to_row(self) -> dict[str, str]:
        row = {}
        for name in self.header():
            v = getattr(self, name)
            if v is None:
                row[name] = ""
            elif name == "seeds":
                row[name] = " ".join(str(s) for s in v)
            elif isinstance(v, float):
                row[name] = repr(v)
            else:
                row[name] = str(v)
        return row

    @classmethod
    def from_row(cls, row: dict[str, str]) -> ResultRecord:
        def num(key, typ):
            return typ(row[key]) if row.get(key, "") != "" else None

        return cls(
            algorithm=row["algorithm"],
            graph=row["graph"],
            model=row["model"],
            k=int(row["k"]),
            diffusion=row.get("diffusion", "ic"),
            spread_mean=num("spread_mean", float),
            spread_std_error=num("spread_std_error", float),
            positive_mean=num("positive_mean", float),
            negative_mean=num("negative_mean", float),
            select_ms=num("select_ms", float),
            peak_rss_bytes=num("peak_rss_bytes", int),
            seeds=[int(s) for s in row.get("seeds", "").split()],
            error=row.get("error", ""),
            schema=int(row.get("schema") or SCHEMA_VERSION),
        )


def write_records(path: str | os.PathLike, records: Iterable[ResultRecord], append: bool = False) -> None:
    path = Path(path)
    new = not append or not path.exists() or path.stat().st_size == 0
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=ResultRecord.header())
        if new:
            w.writeheader()
        for rec in records:
            w.writerow(rec.to_row())


def read_records(path: str | os.PathLike) -> list[ResultRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [ResultRecord.from_row(r) for r in csv.DictReader(fh)]


LONG_METRICS = ("spread_mean", "spread_std_error", "positive_mean", "negative_mean", "select_ms", "peak_rss_bytes")


def write_long(path: str | os.PathLike, records: Iterable[ResultRecord]) -> None:
    """Tidy ``(row, algorithm, graph, model, k, metric, value)`` table for plotting tools."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "algorithm", "graph", "model", "diffusion", "k", "metric", "value"])
        for i, rec in enumerate(records):
            for m in LONG_METRICS:
                v = getattr(rec, m)
                if v is not None:
                    w.writerow([i, rec.algorithm, rec.graph, rec.model, rec.diffusion, rec.k, m, repr(v)])


# --------------------------------------------------------------------------
# execution


def peak_rss_bytes() -> int:
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # Linux reports KiB, macOS bytes
    return int(rss if sys.platform == "darwin" else rss * 1024)


def prepare_graph(spec: ExperimentSpec) -> tuple[Graph, str, str]:
    """Load or generate the graph and apply the probability model.

    Returns the graph plus labels for the graph source and the model.
    """
    if spec.graph:
        g, has_p = read_graph(spec.graph, directed=spec.directed, relabel=spec.relabel)
        name = Path(spec.graph).name
    elif spec.generator:
        gen = dict(spec.generator)
        g = generate_power_law(int(gen["n"]), float(gen["avg_degree"]),
                               float(gen.get("exponent", 2.5)), int(gen.get("seed", 0)))
        has_p = False
        name = f"powerlaw(n={gen['n']},d={gen['avg_degree']},s={gen.get('seed', 0)})"
    else:
        raise ValueError("spec needs either a graph path or generator parameters")
    model = ProbabilityModel.parse(spec.model, rng_seed=spec.seed)
    if model.variant == "file" and not has_p:
        raise InfluMaxError("model 'file' needs an edge list with a probability column")
    return assign_probabilities(g, model), name, str(model)


def run_selector(g: Graph, spec: ExperimentSpec) -> SeedSet:
    k = spec.k
    if spec.algo == "degree":
        return select_degree(g, k)
    if spec.algo == "pagerank":
        return select_pagerank(g, k)
    if spec.algo == "ir":
        return select_top_k_ir(g, k, spec.alpha)
    if spec.algo == "irie":
        return irie_select(g, k, spec.alpha, spec.resolved_theta)
    if spec.algo == "irie-n":
        return irie_n_select(g, k, spec.q, spec.lam, spec.alpha, spec.resolved_theta)
    return greedy_celf(g, k, spec.diffusion_model, MonteCarlo(spec.celf_runs, spec.seed))


def timed_select(g: Graph, spec: ExperimentSpec) -> tuple[SeedSet, float, int]:
    """Run the selector; wall time excludes graph preparation."""
    t0 = time.perf_counter()
    seeds = run_selector(g, spec)
    ms = (time.perf_counter() - t0) * 1000.0
    return seeds, ms, peak_rss_bytes()


def evaluate_into(rec: ResultRecord, g: Graph, seeds: list[int], spec: ExperimentSpec) -> None:
    model = spec.diffusion_model
    est = estimate_spread(g, seeds, model, spec.runs, spec.seed)
    rec.diffusion = "icn" if isinstance(model, ICN) else "ic"
    rec.spread_mean = est.mean
    rec.spread_std_error = est.std_error
    rec.positive_mean = est.mean_positive
    rec.negative_mean = est.mean_negative


def write_seeds(path: str | os.PathLike, g: Graph, seeds: Iterable[int]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(f"{g.label_of(s)}\n" for s in seeds)


def read_seeds(path: str | os.PathLike, g: Graph) -> list[int]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            try:
                out.append(g.node_of(int(s)))
            except (ValueError, KeyError):
                raise SeedError(f"line {lineno}: unknown seed {s!r}") from None
    return out


# --------------------------------------------------------------------------
# sweeps


@dataclass
class SweepSpec:
    """Cross product of graphs x models x algorithms x k values."""

    graphs: list[dict] = field(default_factory=list)
    models: list[str] = field(default_factory=lambda: ["wc"])
    algorithms: list[Any] = field(default_factory=list)
    ks: list[int] = field(default_factory=lambda: [50])
    runs: int = 10_000
    seed: int = 0
    diffusion: str = "ic"
    evaluate: bool = True

    @classmethod
    def from_dict(cls, data: dict) -> SweepSpec:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
        return cls(**data)


def _algo_params(entry) -> dict:
    if isinstance(entry, str):
        return {"algo": entry}
    return dict(entry)


def _graph_params(entry: dict) -> dict:
    e = dict(entry)
    if "path" in e:
        return {"graph": e.pop("path"), "directed": e.pop("directed", True), "relabel": e.pop("relabel", False)}
    return {"generator": e}


def run_sweep(sweep: SweepSpec) -> list[ResultRecord]:
    """Execute every cell; a failing cell yields a row with ``error`` set."""
    records: list[ResultRecord] = []
    for gentry, model in itertools.product(sweep.graphs, sweep.models):
        base = ExperimentSpec(model=model, seed=sweep.seed, runs=sweep.runs,
                              diffusion=sweep.diffusion, **_graph_params(gentry))
        try:
            g, gname, mname = prepare_graph(base)
        except (InfluMaxError, OSError, ValueError) as exc:
            label = gentry.get("path") or json.dumps(gentry, sort_keys=True)
            for aentry, k in itertools.product(sweep.algorithms, sweep.ks):
                records.append(ResultRecord(_algo_params(aentry)["algo"], str(label), model, k, error=str(exc)))
            continue
        for aentry, k in itertools.product(sweep.algorithms, sweep.ks):
            params = _algo_params(aentry)
            rec = ResultRecord(params.get("algo", "?"), gname, mname, k, diffusion=sweep.diffusion)
            try:
                spec = ExperimentSpec(**{**asdict(base), **params, "k": k})
                seeds, ms, rss = timed_select(g, spec)
                rec.seeds, rec.select_ms, rec.peak_rss_bytes = seeds.seeds, ms, rss
                if sweep.evaluate:
                    evaluate_into(rec, g, seeds.seeds, spec)
            except (InfluMaxError, ValueError, ArithmeticError) as exc:
                rec.error = f"{type(exc).__name__}: {exc}"
                log.warning("cell %s/%s/%s/k=%d failed: %s", rec.algorithm, gname, mname, k, exc)
            records.append(rec)
    return records


def long_path(out: str | os.PathLike) -> Path:
    p = Path(out)
    return p.with_name(p.stem + ".long" + (p.suffix or ".csv"))
