"""Command line: generators, pipeline runners, verifiers and the rounds sweep."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import clusters, generators, hso, pipeline, primitives
from .graph import GraphError, Graph, read_edgelist, write_edgelist
from .local import RoundCapExceeded


class CLIError(Exception):
    def __init__(self, msg: str, code: int = 1):
        super().__init__(msg)
        self.code = code


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_graph(path: str) -> Graph:
    return read_edgelist(_read(path))


def _emit_report(args, report: dict) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.report:
        _write(args.report, text)


def _summary(**fields) -> None:
    print("\t".join(f"{k}={fields[k]}" for k in fields))


def _params(args) -> clusters.Params:
    base = clusters.SCALED_DEFAULT if args.scaled else (
        clusters.RANDOMIZED if args.mode == "rand" else clusters.DETERMINISTIC)
    vals = {
        "alpha_dcc": args.alpha_dcc, "alpha_flex": args.alpha_flex, "beta_flex": args.beta_flex,
        "alpha_link": args.alpha_link, "beta_link": args.beta_link,
    }
    merged = {k: (v if v is not None else getattr(base, k)) for k, v in vals.items()}
    try:
        return clusters.Params(**merged, mode=args.mode, scaled=args.scaled)
    except clusters.ParamsError as exc:
        raise CLIError(f"bad parameters: {exc}", 2)


def _add_params(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("cluster constants")
    for flag in ("alpha-dcc", "alpha-flex", "beta-flex", "alpha-link", "beta-link"):
        g.add_argument(f"--{flag}", type=int, default=None)
    g.add_argument("--mode", choices=("det", "rand"), default="det")
    g.add_argument("--scaled", action="store_true",
                   help="allow constants below the proven floors (defaults become 4,2,6,2,13)")


def _add_common(sp: argparse.ArgumentParser, out_help: str = "output file") -> None:
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--round-cap", type=int, default=2000)
    sp.add_argument("--out", default=None, help=out_help)
    sp.add_argument("--report", default=None, help="JSON report path")


# -- subcommands -----------------------------------------------------------

def cmd_gen(args) -> int:
    try:
        if args.family.startswith("file:"):
            g = _load_graph(args.family[5:])
        else:
            g = generators.family(args.family, args.seed, args.girth_floor)
    except generators.GenerationError as exc:
        raise CLIError(str(exc))
    except (ValueError, KeyError, IndexError) as exc:
        raise CLIError(f"bad family spec {args.family!r}: {exc}", 2)
    _write(args.out, write_edgelist(g, comment=f"{args.family} seed={args.seed}"))
    if args.out:
        _summary(family=args.family, n=g.n, m=g.m, delta=g.max_degree())
    return 0


def cmd_run_delta(args) -> int:
    g = _load_graph(args.graph)
    p = _params(args)
    arts: dict = {}
    try:
        col, rep = pipeline.delta_color(g, p, args.seed, hso_round_cap=args.round_cap, artifacts=arts)
    except pipeline.UnsolvableError as exc:
        raise CLIError(str(exc))
    except pipeline.PipelineError as exc:
        raise CLIError(f"pipeline failed in phase {exc.phase}:\n" + "\n".join(str(v) for v in exc.violations))
    bad = pipeline.verify_coloring(g, col, g.max_degree())
    if bad is not None:
        raise CLIError(f"verification failed: {bad}")
    _write(args.out, primitives.write_coloring(col))
    if args.partition:
        _write(args.partition, clusters.write_partition(arts["partition"]))
    _emit_report(args, rep)
    _summary(status="ok", n=g.n, delta=g.max_degree(), colors=rep["colors_used"],
             rounds=rep["rounds_total"], flex=rep["clusters"]["flex"], I=rep["flex_sets"]["|I|"])
    return 0


def cmd_run_bounded(args) -> int:
    g = _load_graph(args.graph)
    p = _params(args)
    try:
        col, rep = pipeline.delta_color_bounded_clique(g, args.omega, p, args.seed)
    except pipeline.UnsolvableError as exc:
        raise CLIError(str(exc))
    except ValueError as exc:
        raise CLIError(f"rejected: {exc}", 2)
    except pipeline.PipelineError as exc:
        raise CLIError(f"pipeline failed in phase {exc.phase}: {exc}")
    bad = pipeline.verify_coloring(g, col, g.max_degree())
    if bad is not None:
        raise CLIError(f"verification failed: {bad}")
    _write(args.out, primitives.write_coloring(col))
    _emit_report(args, rep)
    _summary(status="ok", n=g.n, delta=g.max_degree(), omega=args.omega, colors=rep["colors_used"],
             rounds=rep["rounds_total"])
    return 0


def cmd_run_hso(args) -> int:
    h = hso.read_hypergraph(_read(args.hypergraph))
    try:
        res = hso.hso_distributed(h, args.seed, args.round_cap, randomized=args.mode == "rand")
    except hso.HSOInfeasible as exc:
        raise CLIError(f"no sinkless orientation: Hall violator {list(exc.solution.hall_set)}")
    bad = hso.verify_hso(h, res.orientation)
    if bad is not None:
        raise CLIError(f"verification failed: {bad}")
    _write(args.out, hso.write_orientation(res.orientation))
    dr = hso.check_degree_rank(h) if h.edge_ids else None
    rep = {"schema": pipeline.REPORT_SCHEMA, "pipeline": "hso", "seed": args.seed, "rounds_total": res.rounds,
           "fallback": res.fallback, "nodes": len(h.nodes), "edges": len(h.edge_ids),
           "degree_rank": dr.to_json() if dr else None, "verified": True}
    _emit_report(args, rep)
    _summary(status="ok", nodes=len(h.nodes), edges=len(h.edge_ids), rounds=res.rounds, fallback=res.fallback)
    return 0


def cmd_run_mis(args) -> int:
    g = _load_graph(args.graph)
    backend = args.backend or ("luby" if args.mode == "rand" else "greedy")
    try:
        res = primitives.solve_mis(g, backend, args.seed)
    except RoundCapExceeded as exc:
        raise CLIError(f"round cap {exc.cap} exceeded")
    bad = primitives.verify_mis(g, res.nodes)
    if bad is not None:
        raise CLIError(f"verification failed: {bad}")
    _write(args.out, primitives.write_nodeset(res.nodes))
    rep = {"schema": pipeline.REPORT_SCHEMA, "pipeline": "mis", "backend": backend, "seed": args.seed,
           "n": g.n, "size": len(res.nodes), "rounds_total": res.rounds, "verified": True}
    _emit_report(args, rep)
    _summary(status="ok", n=g.n, size=len(res.nodes), rounds=res.rounds)
    return 0


def cmd_verify(args) -> int:
    kind = args.kind
    if kind == "coloring":
        g = _load_graph(args.files[0])
        col = primitives.read_coloring(_read(args.files[1]))
        bad = pipeline.verify_coloring(g, col, args.max_color or g.max_degree())
    elif kind == "mis":
        g = _load_graph(args.files[0])
        bad = primitives.verify_mis(g, primitives.read_nodeset(_read(args.files[1])))
    elif kind == "hso":
        h = hso.read_hypergraph(_read(args.files[0]))
        try:
            bad = hso.verify_hso(h, hso.read_orientation(_read(args.files[1])))
        except ValueError as exc:
            bad = primitives.Violation("malformed", str(exc))
    else:
        g = _load_graph(args.files[0])
        cp = clusters.read_partition(g, _read(args.files[1]))
        found = clusters.verify_partition(cp)
        bad = found[0] if found else None
        for v in found[1:]:
            print(f"violation\t{v}", file=sys.stderr)
    if bad is not None:
        raise CLIError(f"violation\t{bad}")
    _summary(status="ok", kind=kind)
    return 0


def cmd_sweep(args) -> int:
    from . import report

    sizes = [int(x) for x in args.sizes.split(",")]
    seeds = range(args.seed, args.seed + args.seeds)
    p = _params(args)
    rows = report.sweep(sizes, args.delta, seeds, p)
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "sweep.csv")
    png_path = os.path.join(args.out_dir, "sweep.png")
    _write(csv_path, report.rows_to_csv(rows))
    report.plot_sweep(rows, png_path, f"Δ={args.delta}, constants {p.as_tuple()}")
    sys.stdout.write(report.rows_to_csv(rows))
    return 0


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deltacolor", description="LOCAL-model Delta-coloring toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("gen", help="write a generated graph as an edge list")
    sp.add_argument("family", help="e.g. random-regular:100:3, tree:2:12, cycle:6, hypercube:3, "
                                   "complete-bipartite:3:3, random-bipartite:50:3, cage:tutte-12, file:PATH")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--girth-floor", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("run-delta", help="Delta-color a graph")
    sp.add_argument("graph")
    _add_params(sp)
    _add_common(sp, "coloring output")
    sp.add_argument("--partition", default=None, help="also write the cluster partition here")
    sp.set_defaults(func=cmd_run_delta)

    sp = sub.add_parser("run-bounded-clique", help="Delta-color a K_{omega+1}-free graph")
    sp.add_argument("graph")
    sp.add_argument("--omega", type=int, required=True)
    _add_params(sp)
    _add_common(sp, "coloring output")
    sp.set_defaults(func=cmd_run_bounded)

    sp = sub.add_parser("run-hso", help="sinkless orientation of a multihypergraph")
    sp.add_argument("hypergraph")
    sp.add_argument("--mode", choices=("det", "rand"), default="det")
    _add_common(sp, "orientation output")
    sp.set_defaults(func=cmd_run_hso)

    sp = sub.add_parser("run-mis", help="maximal independent set")
    sp.add_argument("graph")
    sp.add_argument("--mode", choices=("det", "rand"), default="det")
    sp.add_argument("--backend", choices=("greedy", "localmin", "luby"), default=None)
    _add_common(sp, "node set output")
    sp.set_defaults(func=cmd_run_mis)

    sp = sub.add_parser("verify", help="check an artifact")
    sp.add_argument("kind", choices=("coloring", "mis", "hso", "partition"))
    sp.add_argument("files", nargs=2, metavar="FILE",
                    help="graph (or hypergraph) file, then the artifact")
    sp.add_argument("--max-color", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="phase-split rounds over random regular graphs (CSV + PNG)")
    sp.add_argument("--sizes", default="100,1000,10000")
    sp.add_argument("--delta", type=int, default=3)
    sp.add_argument("--seeds", type=int, default=1, help="number of seeds per size")
    sp.add_argument("--seed", type=int, default=0, help="first seed")
    sp.add_argument("--out-dir", default="sweep-out")
    _add_params(sp)
    sp.set_defaults(func=cmd_sweep)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
