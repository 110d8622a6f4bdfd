"""Command-line entry points.

Each tool is installed as its own console script (``netgen``, ``pagerank``,
``walk``, ``searchrank``, ``fit``, ``kendall``, ``sweep``, ``alpha-sweep``,
``kendall-study``) and is also reachable as ``python -m searchrank TOOL``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, harness, ranks
from .google import classical_pagerank, google_from_graph
from .netgen import ScaleFreeParams, generate_scale_free, load_edge_list, store_edge_list
from .szegedy import OracleSet, Walker, build_sqrt_columns


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", newline="", encoding="utf-8")


def _write_distribution(dist, path):
    fh = _open_out(path)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "score"])
        for i, v in enumerate(dist):
            w.writerow([i, repr(float(v))])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _read_scores(path):
    scores = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            scores[int(row["node"])] = float(row["score"])
    return scores


def _setup_logging():
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")


# --------------------------------------------------------------------------


def netgen_main(argv=None):
    p = argparse.ArgumentParser(prog="netgen", description="Generate a directed scale-free graph.")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    d = ScaleFreeParams()
    p.add_argument("--a", type=float, default=d.a)
    p.add_argument("--b", type=float, default=d.b)
    p.add_argument("--g", type=float, default=d.g)
    p.add_argument("--din", type=float, default=d.delta_in)
    p.add_argument("--dout", type=float, default=d.delta_out)
    p.add_argument("--out", required=True)
    args = p.parse_args(argv)
    params = ScaleFreeParams(args.a, args.b, args.g, args.din, args.dout)
    store_edge_list(generate_scale_free(args.nodes, args.seed, params), args.out)
    return 0


def pagerank_main(argv=None):
    p = argparse.ArgumentParser(prog="pagerank", description="Classical PageRank by power iteration.")
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--out", default="-")
    args = p.parse_args(argv)
    G = google_from_graph(load_edge_list(args.graph), args.alpha)
    _write_distribution(classical_pagerank(G, args.tol, args.max_iter), args.out)
    return 0


def walk_main(argv=None):
    p = argparse.ArgumentParser(prog="walk", description="Register-2 marginals of a Szegedy walk, step by step.")
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--marked", type=_int_list, default=[])
    p.add_argument("--tq", type=int, required=True)
    p.add_argument("--dump-marginal", action="store_true")
    p.add_argument("--out", default="-")
    args = p.parse_args(argv)
    g = load_edge_list(args.graph)
    sq = build_sqrt_columns(google_from_graph(g, args.alpha))
    walker = Walker(sq, OracleSet(g.n, tuple(args.marked)), sq.rows / np.sqrt(g.n))
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "node", "prob"])
        for t in range(args.tq + 1):
            if t:
                walker.step()
            if args.dump_marginal or t == args.tq:
                for j, v in enumerate(walker.marginal()):
                    w.writerow([t, j, repr(float(v))])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def searchrank_main(argv=None):
    p = argparse.ArgumentParser(prog="searchrank", description="Quantum, semiclassical or randomized SearchRank.")
    p.add_argument("algorithm", choices=ranks.ALGORITHMS)
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--marked", type=_int_list, required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--tq", type=int)
    mode.add_argument("--curve", action="store_true")
    p.add_argument("--tmax", type=int)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--trajectory", help="semiclassical only: write tc,node,prob")
    p.add_argument("--out", default="-")
    args = p.parse_args(argv)

    g = load_edge_list(args.graph)
    G = google_from_graph(g, args.alpha)
    oracle = OracleSet(g.n, tuple(args.marked))

    if args.curve:
        if not args.tmax:
            p.error("--curve requires --tmax")
        cs = ranks.searchrank_curves(G, oracle, args.tmax, (args.algorithm,), args.tol, args.max_steps)
        curve = cs[args.algorithm].curve
        fh = _open_out(args.out)
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["tq", "p_marked"])
            for t, v in zip(curve.t, curve.p):
                w.writerow([int(t), repr(float(v))])
        finally:
            if fh is not sys.stdout:
                fh.close()
        return 0

    if args.algorithm == "quantum":
        _, dists = ranks.quantum_searchrank_curve(G, oracle, args.tq)
        dist = dists[args.tq]
    elif args.algorithm == "randomized":
        dist = ranks.randomized_searchrank(G, oracle, args.tq)
    else:
        res = ranks.semiclassical_searchrank(G, oracle, args.tq, args.tol, args.max_steps,
                                             keep_trajectory=bool(args.trajectory))
        dist = res.dist
        if args.trajectory:
            with open(args.trajectory, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["tc", "node", "prob"])
                for tc, q in enumerate(res.trajectory):
                    for j, v in enumerate(q):
                        w.writerow([tc, j, repr(float(v))])
    _write_distribution(dist, args.out)
    return 0


_Y_ALIASES = {"p_max": "p_star", "t_max": "t_star", "t_opt": "t_star"}


def fit_main(argv=None):
    p = argparse.ArgumentParser(prog="fit", description="Fit y = A x^n in log-log space.")
    p.add_argument("--input", required=True)
    p.add_argument("--x", default="ratio")
    p.add_argument("--y", default="p_star")
    p.add_argument("--cutoff", type=float, default=0.0)
    p.add_argument("--algorithm", help="keep only rows of this algorithm")
    args = p.parse_args(argv)
    xcol, ycol = _Y_ALIASES.get(args.x, args.x), _Y_ALIASES.get(args.y, args.y)
    points = []
    with open(args.input, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row.get("error"):
                continue
            if args.algorithm and row.get("algorithm") != args.algorithm:
                continue
            if xcol == "ratio" and "ratio" not in row:
                x = int(row["N"]) / int(row["M"])
            else:
                x = float(row[xcol])
            points.append((x, float(row[ycol])))
    res = analysis.fit_power_law(points, args.cutoff)
    d = res.as_dict()
    print(json.dumps({k: d[k] for k in ("A", "n", "stderr_A", "stderr_n", "npoints")}))
    return 0


def kendall_main(argv=None):
    p = argparse.ArgumentParser(prog="kendall", description="Kendall tau-b between two node,score files.")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--items", type=_int_list, help="restrict to these nodes (default: all common)")
    p.add_argument("--rtol", type=float, default=0.0)
    args = p.parse_args(argv)
    a, b = _read_scores(args.a), _read_scores(args.b)
    items = args.items or sorted(set(a) & set(b))
    res = analysis.kendall_tau([a[i] for i in items], [b[i] for i in items], args.rtol)
    print(json.dumps(res.as_dict()))
    return 0


def sweep_main(argv=None, kendall=False):
    prog = "kendall-study" if kendall else "sweep"
    p = argparse.ArgumentParser(prog=prog, description="Run an N/M sweep and write its outputs.")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args(argv)
    _setup_logging()
    cfg = harness.SweepConfig.from_json(args.config)
    records = harness.run_kendall_study(cfg, args.jobs) if kendall else harness.run_sweep(cfg, args.jobs)
    harness.emit_outputs(records, args.out, cfg.asymptotic_cutoff)
    return 0


def kendall_study_main(argv=None):
    return sweep_main(argv, kendall=True)


def alpha_sweep_main(argv=None):
    p = argparse.ArgumentParser(prog="alpha-sweep", description="Peak probability and time versus damping.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--nodes", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--marked-count", type=int, default=6)
    p.add_argument("--marked", type=_int_list, help="explicit marked nodes (overrides --marked-count)")
    p.add_argument("--alphas", type=_float_list, default=[round(0.1 * i, 1) for i in range(11)])
    p.add_argument("--tmax", type=int)
    p.add_argument("--keep-curves", action="store_true")
    p.add_argument("--out", required=True)
    args = p.parse_args(argv)
    _setup_logging()
    cfg = harness.SweepConfig(keep_curves=args.keep_curves)
    graph = load_edge_list(args.graph) if args.graph else None
    records = harness.run_alpha_sweep(args.alphas, N=args.nodes or 0, M=args.marked_count, seed=args.seed,
                                      t_max=args.tmax, graph=graph, cfg=cfg, marked=args.marked)
    harness.emit_outputs(records, args.out)
    return 0


COMMANDS = {
    "netgen": netgen_main,
    "pagerank": pagerank_main,
    "walk": walk_main,
    "searchrank": searchrank_main,
    "fit": fit_main,
    "kendall": kendall_main,
    "sweep": sweep_main,
    "alpha-sweep": alpha_sweep_main,
    "kendall-study": kendall_study_main,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in COMMANDS:
        print(f"usage: python -m searchrank {{{','.join(COMMANDS)}}} ...", file=sys.stderr)
        return 2
    return COMMANDS[argv[0]](argv[1:])


if __name__ == "__main__":
    sys.exit(main())
