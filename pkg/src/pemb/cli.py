"""Command-line front end: ``pemb build|query|bench|gen|stats``.

Every command prints ``key=value`` lines on stdout. Exit codes: 0 success,
1 usage, 2 invalid input, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from . import rotation
from .core import PembStructure, bench_queries, build_sequential
from .errors import PembError, RangeError, ValidationError
from .parbuild import par_build

EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(pairs: dict) -> None:
    for k, v in pairs.items():
        if isinstance(v, float):
            v = f"{v:.6g}"
        elif isinstance(v, (list, tuple)):
            v = " ".join(str(x) for x in v)
        print(f"{k}={v}")


def _read_tree_edges(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        ids = [int(x) for x in fh.read().split()]
    return np.asarray(ids, dtype=np.int64) - 1


def make_tree(g: rotation.RotationSystem, kind: str, threads: int | None, tree_edges=None):
    if tree_edges is not None:
        return rotation.spanning_tree_from_edges(g, tree_edges)
    if kind == "dfs":
        return rotation.spanning_tree_dfs(g)
    return rotation.spanning_tree_parallel(g, threads or 1)


def encode_graph(g, tree: str = "dfs", threads: int | None = None, tree_edges=None, indexes=()) -> PembStructure:
    t = make_tree(g, tree, threads, tree_edges)
    s = build_sequential(g, t) if threads is None else par_build(g, t, threads)
    if "degree" in indexes:
        s.build_degree_index()
    if "neighbour" in indexes:
        s.build_neighbour_index()
    return s


def _parse_indexes(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    for x in names:
        if x not in ("degree", "neighbour"):
            raise UsageError(f"unknown index {x!r} (expected degree, neighbour)")
    return names


def cmd_build(args) -> int:
    g = rotation.load_pg(args.input)
    tree_edges = _read_tree_edges(args.tree_edges) if args.tree_edges else None
    t0 = time.perf_counter()
    s = encode_graph(g, args.tree, args.threads, tree_edges, _parse_indexes(args.indexes))
    elapsed = time.perf_counter() - t0
    s.save(args.output)
    _emit({"n": s.n, "m": s.m, "output": args.output, "bits_per_edge": s.bits_per_edge(),
           "build_seconds": elapsed, "threads": args.threads or 0})
    return 0


def _query(s: PembStructure, op: str, vals: list[int], order: str | None):
    need = {"degree": 1, "listing": 1, "face": 1, "neighbour": 2, "dfs": 1, "first": 1, "last": 1,
            "next": 1, "prev": 1, "mate": 1, "vertex": 1}
    if len(vals) != need[op]:
        raise UsageError(f"--op {op} takes {need[op]} argument(s), got {len(vals)}")
    if op == "listing":
        return s.listing(vals[0], order or "ccw")
    if op == "face":
        return s.face(vals[0], order or "cw")
    if op == "neighbour":
        return int(s.neighbour(*vals))
    if op == "dfs":
        return s.dfs(vals[0])
    return getattr(s, op)(vals[0])


def cmd_query(args) -> int:
    s = PembStructure.load(args.structure)
    res = _query(s, args.op, args.args, args.order)
    out = {"op": args.op, "args": args.args, "result": res}
    if isinstance(res, list):
        out["count"] = len(res)
    _emit(out)
    return 0


def _generate(args) -> rotation.RotationSystem:
    if args.kind == "grid":
        g = rotation.grid(args.rows, args.cols)
    elif args.kind == "stacked":
        g = rotation.stacked_triangulation(args.k, args.seed)
    elif args.kind == "cycle":
        g = rotation.cycle(args.k)
    else:
        raise UsageError(f"unknown kind {args.kind!r}")
    if args.thin:
        g = rotation.thin(g, args.thin, args.seed)
    if args.multi or args.loops:
        g = rotation.decorate(g, args.multi, args.loops, args.seed)
    return g


def cmd_gen(args) -> int:
    g = _generate(args)
    rotation.save_pg(g, args.out)
    _emit({"kind": args.kind, "n": g.n, "m": g.m, "out": args.out})
    return 0


def cmd_stats(args) -> int:
    s = PembStructure.load(args.structure)
    _emit(s.stats())
    return 0


def _median_time(fn, reps: int) -> float:
    fn()  # warm-up
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _bench_query_latency(s: PembStructure, g, rng, reps: int, samples: int) -> dict:
    out = {}
    k = min(samples, g.n)
    verts = rng.integers(1, g.n + 1, size=k)
    slots = rng.integers(1, 2 * g.m + 1, size=min(samples, 2 * g.m)) if g.m else np.zeros(0, np.int64)
    for op, sample in (("degree", verts), ("listing", verts), ("face", slots)):
        if len(sample) == 0:
            continue
        med = _median_time(lambda: bench_queries(s, op, sample), reps)
        out[f"{op}_median_us"] = 1e6 * med / len(sample)
    seeds = rng.integers(1, g.n + 1, size=reps + 1).tolist()
    dfs_times = []
    s.dfs(seeds[0])
    for v in seeds[1:]:
        t0 = time.perf_counter()
        s.dfs(v)
        dfs_times.append(time.perf_counter() - t0)
    out["dfs_median_ms"] = 1e3 * statistics.median(dfs_times)
    return out


def cmd_bench(args) -> int:
    if args.reps < 10:
        raise UsageError("--reps must be at least 10 (medians over fewer runs are not reported)")
    threads_list = [int(x) for x in args.threads_list.split(",") if x.strip()]
    if not threads_list or min(threads_list) < 1:
        raise UsageError("--threads-list needs positive thread counts")
    if args.input:
        g = rotation.load_pg(args.input)
        name = args.input
    else:
        g = _generate(args)
        name = f"{args.kind}"
    rng = np.random.default_rng(args.seed)
    report = {"dataset": name, "n": g.n, "m": g.m}

    t = rotation.spanning_tree_dfs(g)
    build_reps = max(1, args.build_reps)
    seq = _median_time(lambda: build_sequential(g, t), build_reps)
    report["build_sequential_seconds"] = seq
    report["build_sequential_us_per_edge"] = 1e6 * seq / max(g.m, 1)
    times = {}
    for p in threads_list:
        times[p] = _median_time(lambda: par_build(g, t, p), build_reps)
        report[f"build_seconds_p{p}"] = times[p]
    base = times.get(1, seq)
    for p in threads_list:
        speedup = base / times[p]
        report[f"speedup_p{p}"] = speedup
        report[f"efficiency_p{p}"] = speedup / p

    s = build_sequential(g, t)
    report["bits_per_edge"] = s.bits_per_edge()
    if args.queries:
        report.update(_bench_query_latency(s, g, rng, args.reps, args.samples))
    report["reps"] = args.reps
    _emit(report)
    return 0


def _add_gen_args(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--kind", choices=["grid", "stacked", "cycle"], required=required)
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--cols", type=int, default=10)
    p.add_argument("--k", type=int, default=100, help="inserted vertices (stacked) or cycle length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multi", type=int, default=0, help="parallel edges to add")
    p.add_argument("--loops", type=int, default=0, help="self-loops to add")
    p.add_argument("--thin", type=float, default=0.0, help="fraction of non-tree edges to delete")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pemb", description="Compact planar embeddings: build, query, benchmark.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="encode a PG1 graph into a .pemb file")
    b.add_argument("--input", required=True)
    b.add_argument("--output", required=True)
    b.add_argument("--threads", type=int, default=None, help="parallel build with N workers")
    b.add_argument("--tree", choices=["dfs", "parallel"], default="dfs")
    b.add_argument("--tree-edges", default=None, help="file of 1-based edge ids forming the spanning tree")
    b.add_argument("--indexes", default=None, help="comma list of degree,neighbour")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="run one query against a .pemb file")
    q.add_argument("--structure", required=True)
    q.add_argument("--op", required=True, choices=["degree", "listing", "face", "neighbour", "dfs", "first",
                                                   "last", "next", "prev", "mate", "vertex"])
    q.add_argument("--order", choices=["ccw", "cw"], default=None)
    q.add_argument("args", nargs="*", type=int)
    q.set_defaults(func=cmd_query)

    be = sub.add_parser("bench", help="time construction and queries")
    be.add_argument("--input", default=None)
    _add_gen_args(be, required=False)
    be.add_argument("--reps", type=int, default=15)
    be.add_argument("--build-reps", type=int, default=3)
    be.add_argument("--threads-list", default="1,2,4")
    be.add_argument("--samples", type=int, default=10000)
    be.add_argument("--queries", action=argparse.BooleanOptionalAction, default=True,
                    help="time degree/listing/face/dfs (--no-queries: construction only)")
    be.set_defaults(func=cmd_bench)

    gn = sub.add_parser("gen", help="write a generated graph as PG1")
    _add_gen_args(gn, required=True)
    gn.add_argument("--out", required=True)
    gn.set_defaults(func=cmd_gen)

    st = sub.add_parser("stats", help="size and entropy report for a .pemb file")
    st.add_argument("--structure", required=True)
    st.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", None) is not None and args.threads < 1:
            parser.error("--threads must be >= 1")
        if args.command == "bench" and not args.input and not args.kind:
            parser.error("bench needs --input or --kind")
    except SystemExit as exc:
        # argparse exits on usage errors and --help; report that as a return code
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pemb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, RangeError, PembError) as exc:
        print(f"pemb: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"pemb: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
