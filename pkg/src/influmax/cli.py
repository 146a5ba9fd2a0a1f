"""``influmax`` command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error, 4 rank divergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .bench import (
    ALGORITHMS,
    ExperimentSpec,
    ResultRecord,
    SweepSpec,
    evaluate_into,
    long_path,
    prepare_graph,
    read_seeds,
    run_sweep,
    timed_select,
    write_long,
    write_records,
    write_seeds,
)
from .errors import DivergenceError, InfluMaxError
from .graph import ProbabilityModel, assign_probabilities, generate_power_law, read_graph, write_edgelist

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DIVERGENCE = 4

# flag dest -> ExperimentSpec field
_SPEC_FLAGS = {
    "graph": "graph", "model": "model", "algo": "algo", "k": "k", "alpha": "alpha",
    "theta": "theta", "q": "q", "lam": "lam", "runs": "runs", "seed": "seed",
    "out": "out", "diffusion": "diffusion", "celf_runs": "celf_runs",
    "undirected": "directed", "relabel": "relabel",
}


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    # defaults are None so that a --spec file can fill the gaps
    p.add_argument("--spec", help="JSON spec file; explicit flags override its values")
    p.add_argument("--graph", help="edge list: 'u v' or 'u v p' per line")
    p.add_argument("--undirected", action="store_const", const=True, default=None,
                   help="treat the edge list as undirected")
    p.add_argument("--relabel", action="store_const", const=True, default=None,
                   help="compact sparse node ids to 0..n-1")
    p.add_argument("--model", help="wc | tr | bivalency:<i> | uniform:<p> | file")
    p.add_argument("--seed", type=int, help="RNG seed for probability models and Monte-Carlo runs")
    p.add_argument("--runs", type=int, help="Monte-Carlo runs for evaluation")
    p.add_argument("--q", type=float, help="IC-N quality factor")
    p.add_argument("--lambda", dest="lam", type=float, help="weight of negative spread")
    p.add_argument("--diffusion", choices=("ic", "icn"), help="diffusion model for evaluation and CELF")
    p.add_argument("--record", help="append a result row to this CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="influmax", description="Influence maximization toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate synthetic power-law graphs")
    p.add_argument("--n", type=int, nargs="+", required=True, help="node counts")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--avg-degree", type=float, nargs="+", help="average out-degrees")
    group.add_argument("--edges", type=int, nargs="+", help="total edge counts (avg degree = edges / n)")
    p.add_argument("--exponent", type=float, default=2.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", help="also assign probabilities with this model")
    p.add_argument("--out", required=True, help="output file, or directory when sweeping")

    p = sub.add_parser("assign", help="write an edge list with probabilities")
    p.add_argument("--graph", required=True)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--model", default="wc")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("select", help="select a seed set")
    _add_common(p)
    p.add_argument("--algo", help=" | ".join(ALGORITHMS))
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--celf-runs", type=int, help="Monte-Carlo runs per CELF gain evaluation")
    p.add_argument("--evaluate", action="store_true", help="also estimate the spread of the result")
    p.add_argument("--out", help="seed list output (one id per line)")

    p = sub.add_parser("evaluate", help="estimate the spread of a seed list")
    _add_common(p)
    p.add_argument("--seeds", required=True, help="seed list file")

    p = sub.add_parser("bench", help="run a sweep described by a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="results CSV; a .long.csv companion is written next to it")
    return parser


def _spec_from_args(args) -> ExperimentSpec:
    data = {}
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            data = json.load(fh)
    for dest, name in _SPEC_FLAGS.items():
        v = getattr(args, dest, None)
        if v is None:
            continue
        data[name] = (not v) if dest == "undirected" else v
    if "k" in data and data["k"] < 1:
        raise UsageError(f"--k must be >= 1, got {data['k']}")
    try:
        return ExperimentSpec.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _cmd_gen(args) -> int:
    avgs = args.avg_degree
    if args.edges:
        if len(args.n) != 1:
            raise UsageError("--edges sweeps need a single --n")
        avgs = [e / args.n[0] for e in args.edges]
    if not avgs:
        raise UsageError("give --avg-degree or --edges")
    cells = [(n, d) for n in args.n for d in avgs]
    model = ProbabilityModel.parse(args.model, rng_seed=args.seed) if args.model else None
    out = Path(args.out)
    if len(cells) > 1:
        out.mkdir(parents=True, exist_ok=True)
    for n, d in cells:
        g = generate_power_law(n, d, args.exponent, args.seed)
        if model is not None:
            g = assign_probabilities(g, model)
        path = out / f"powerlaw_n{n}_e{g.edge_count}_s{args.seed}.txt" if len(cells) > 1 else out
        write_edgelist(g, path, with_probs=model is not None)
        print(f"{path}\t{g.node_count}\t{g.edge_count}")
    return 0


def _cmd_assign(args) -> int:
    g, has_p = read_graph(args.graph, directed=not args.undirected)
    model = ProbabilityModel.parse(args.model, rng_seed=args.seed)
    if model.variant == "file" and not has_p:
        raise InfluMaxError("model 'file' needs an edge list with a probability column")
    write_edgelist(assign_probabilities(g, model), args.out)
    return 0


def _cmd_select(args) -> int:
    spec = _spec_from_args(args)
    g, gname, mname = prepare_graph(spec)
    if spec.k > g.node_count:
        raise UsageError(f"k={spec.k} exceeds the node count {g.node_count}")
    seeds, ms, rss = timed_select(g, spec)
    rec = ResultRecord(spec.algo, gname, mname, spec.k, select_ms=ms, peak_rss_bytes=rss,
                       seeds=[g.label_of(s) for s in seeds.seeds])
    if args.evaluate:
        evaluate_into(rec, g, seeds.seeds, spec)
    if spec.out:
        write_seeds(spec.out, g, seeds.seeds)
    if args.record:
        write_records(args.record, [rec], append=True)
    print(json.dumps(asdict(rec)))
    return 0


def _cmd_evaluate(args) -> int:
    spec = _spec_from_args(args)
    g, gname, mname = prepare_graph(spec)
    seeds = read_seeds(args.seeds, g)
    rec = ResultRecord("evaluate", gname, mname, len(seeds), seeds=[g.label_of(s) for s in seeds])
    evaluate_into(rec, g, seeds, spec)
    if args.record:
        write_records(args.record, [rec], append=True)
    print(json.dumps(asdict(rec)))
    return 0


def _cmd_bench(args) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        try:
            sweep = SweepSpec.from_dict(json.load(fh))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad sweep spec: {exc}") from None
    records = run_sweep(sweep)
    write_records(args.out, records)
    write_long(long_path(args.out), records)
    failed = sum(1 for r in records if r.error)
    print(f"{len(records)} rows written to {args.out} ({failed} failed)")
    return 0


COMMANDS = {
    "gen": _cmd_gen,
    "assign": _cmd_assign,
    "select": _cmd_select,
    "evaluate": _cmd_evaluate,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"influmax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"influmax: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (InfluMaxError, OSError, ValueError) as exc:
        print(f"influmax: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
