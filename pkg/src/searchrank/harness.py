"""Experiment orchestration: N/M sweeps, damping sweeps and Kendall studies.

Seeding
-------
Every random draw derives from ``SeedSequence(master_seed, spawn_key=...)``:

* graph for size ``N`` and replica ``seed``:  ``spawn_key=(N, seed)``
* marked nodes for that graph and count ``M``: ``spawn_key=(N, seed, M)``

Graphs are therefore shared by all marked counts of a replica, and every
cell is reproducible on its own, in any order, in any worker.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .analysis import (
    InsufficientDataError,
    UndefinedCorrelationError,
    first_maximum,
    global_maximum,
    fit_power_law,
    kendall_tau,
    reference_time,
)
from .google import ConvergenceError, classical_pagerank, google_from_graph
from .netgen import DirectedGraph, ScaleFreeParams, generate_scale_free
from .ranks import ALGORITHMS, quantum_pagerank, searchrank_curves
from .szegedy import OracleSet

log = logging.getLogger(__name__)

# scores closer than this (relative) are treated as tied by Kendall's tau
TIE_RTOL = 1e-9


PEAK_RULES = {"first": first_maximum, "global": global_maximum}


@dataclass
class SweepConfig:
    sizes: list = field(default_factory=lambda: [64, 128, 256, 512])
    marked_counts: list = field(default_factory=lambda: [1, 3, 6, 12, 24, 48])
    seeds_per_cell: int = 3
    alpha: float = 0.25
    pagerank_alpha: float = 0.85
    t_max_factor: float = 3.0
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    tol: float = 1e-8
    max_steps: int = 10_000
    pagerank_tol: float = 1e-10
    quantum_pagerank_steps: int = 1000
    master_seed: int = 0
    asymptotic_cutoff: float = 20.0
    kendall: bool = False
    keep_curves: bool = False
    # largest N for which semiclassical/randomized cells are run
    max_n_semiclassical: int = 512
    generator: dict = field(default_factory=dict)
    # "first" (earliest local maximum) or "global" (highest point up to t_max)
    peak_rule: str = "first"

    def validate(self):
        if self.seeds_per_cell < 1:
            raise ValueError("seeds_per_cell must be >= 1")
        if self.t_max_factor < 1:
            raise ValueError("t_max_factor must be >= 1")
        if min(self.sizes) < max(self.marked_counts):
            raise ValueError("every marked count must be <= every network size")
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ValueError(f"unknown algorithms {sorted(bad)}")
        if self.peak_rule not in PEAK_RULES:
            raise ValueError(f"peak_rule must be one of {sorted(PEAK_RULES)}")
        ScaleFreeParams(**self.generator).validate()

    def t_max(self, N, M):
        return int(math.ceil(self.t_max_factor * math.sqrt(N / M)))

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class ResultRecord:
    N: int
    M: int
    seed: int
    alpha: float
    algorithm: str
    t_star: int = -1
    p_star: float = math.nan
    boundary: bool = False
    t_ref: int = -1
    p_ref: float = math.nan
    tc_star: int = -1
    wall_time: float = math.nan
    tau_classical: float = math.nan
    tau_quantum: float = math.nan
    marked: str = ""
    error: str = ""
    curve: list | None = None

    @property
    def ratio(self) -> float:
        return self.N / self.M

    @property
    def ok(self) -> bool:
        return not self.error


CSV_FIELDS = [f.name for f in fields(ResultRecord) if f.name != "curve"]
_INT_FIELDS = {"N", "M", "seed", "t_star", "t_ref", "tc_star"}
_FLOAT_FIELDS = {"alpha", "p_star", "p_ref", "wall_time", "tau_classical", "tau_quantum"}


# --------------------------------------------------------------------------
# seeding
# --------------------------------------------------------------------------


def graph_seed(master_seed: int, N: int, seed: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(N, seed))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def draw_marked(master_seed: int, N: int, seed: int, M: int) -> OracleSet:
    rng = np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(N, seed, M)))
    return OracleSet(N, tuple(int(i) for i in rng.choice(N, size=M, replace=False)))


def make_graph(cfg: SweepConfig, N: int, seed: int) -> DirectedGraph:
    return generate_scale_free(N, graph_seed(cfg.master_seed, N, seed), ScaleFreeParams(**cfg.generator))


# --------------------------------------------------------------------------
# single cells
# --------------------------------------------------------------------------


def _tau(scores, reference, marked):
    idx = list(marked)
    if len(idx) < 2:
        return math.nan
    try:
        return kendall_tau(scores[idx], reference[idx], rtol=TIE_RTOL).tau
    except UndefinedCorrelationError:
        return math.nan


def evaluate_curves(cfg, graph, N, M, seed, oracle, alpha, t_max, algorithms, pageranks=None):
    """Run the selected algorithms on one (graph, oracle, alpha) and build records."""
    G = google_from_graph(graph, alpha)
    t_ref = reference_time(N, M)
    records = []
    timings = {}

    t0 = time.perf_counter()
    curves = {}
    if "quantum" in algorithms:
        curves.update(searchrank_curves(G, oracle, t_max, ("quantum",), cfg.tol, cfg.max_steps))
        timings["quantum"] = time.perf_counter() - t0
    rest = [a for a in ("semiclassical", "randomized") if a in algorithms]
    if rest:
        t1 = time.perf_counter()
        curves.update(searchrank_curves(G, oracle, t_max, rest, cfg.tol, cfg.max_steps))
        shared = time.perf_counter() - t1
        for a in rest:
            timings[a] = shared

    for algo in algorithms:
        rec = ResultRecord(N=N, M=M, seed=seed, alpha=alpha, algorithm=algo, t_ref=t_ref,
                           marked=" ".join(map(str, oracle.marked)), wall_time=timings[algo])
        cs = curves[algo]
        if cfg.keep_curves:
            rec.curve = [float(v) for v in cs.dists[:, list(oracle.marked)].sum(axis=1)]
        try:
            peak = PEAK_RULES[cfg.peak_rule](cs.curve)
        except InsufficientDataError as exc:
            rec.error = f"{type(exc).__name__}: {exc}; {cs.errors}"
            records.append(rec)
            continue
        rec.t_star, rec.p_star, rec.boundary = peak.t_star, peak.p_star, peak.boundary
        try:
            rec.p_ref = cs.curve.at(t_ref)
        except KeyError:
            rec.error = f"no converged point at reference time {t_ref}"
        if cs.tc_star is not None:
            rec.tc_star = int(cs.tc_star[peak.t_star])
        if cs.errors:
            rec.error = (rec.error + "; " if rec.error else "") + f"non-converged t_q: {sorted(cs.errors)}"
        if pageranks is not None:
            dist = cs.dists[peak.t_star]
            rec.tau_classical = _tau(dist, pageranks[0], oracle.marked)
            rec.tau_quantum = _tau(dist, pageranks[1], oracle.marked)
        records.append(rec)
    return records


def _pageranks(cfg, graph):
    Gp = google_from_graph(graph, cfg.pagerank_alpha)
    return classical_pagerank(Gp, cfg.pagerank_tol), quantum_pagerank(Gp, cfg.quantum_pagerank_steps)


def run_replica(cfg: SweepConfig, N: int, seed: int) -> list:
    """All marked counts for one graph; the unit of parallel work."""
    records = []
    try:
        graph = make_graph(cfg, N, seed)
        pageranks = _pageranks(cfg, graph) if cfg.kendall else None
    except Exception as exc:  # noqa: BLE001 - recorded, never fatal
        for M in cfg.marked_counts:
            for algo in cfg.algorithms:
                records.append(ResultRecord(N=N, M=M, seed=seed, alpha=cfg.alpha, algorithm=algo,
                                            error=f"{type(exc).__name__}: {exc}"))
        return records
    algos = [a for a in cfg.algorithms if a == "quantum" or N <= cfg.max_n_semiclassical]
    for M in cfg.marked_counts:
        oracle = draw_marked(cfg.master_seed, N, seed, M)
        try:
            records += evaluate_curves(cfg, graph, N, M, seed, oracle, cfg.alpha, cfg.t_max(N, M),
                                       algos, pageranks)
        except (ConvergenceError, ValueError, FloatingPointError) as exc:
            for algo in algos:
                records.append(ResultRecord(N=N, M=M, seed=seed, alpha=cfg.alpha, algorithm=algo,
                                            t_ref=reference_time(N, M),
                                            error=f"{type(exc).__name__}: {exc}"))
        log.info("cell N=%d M=%d seed=%d done", N, M, seed)
    return records


def _sort_key(r):
    return (r.N, r.M, r.seed, r.alpha, ALGORITHMS.index(r.algorithm))


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list:
    cfg.validate()
    units = [(N, s) for N in cfg.sizes for s in range(cfg.seeds_per_cell)]
    records = []
    if jobs <= 1:
        for N, s in units:
            records += run_replica(cfg, N, s)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for recs in pool.map(run_replica, [cfg] * len(units), *zip(*units)):
                records += recs
    return sorted(records, key=_sort_key)


def run_kendall_study(cfg: SweepConfig, jobs: int = 1) -> list:
    """Sweep with tau of marked-node SearchRank scores vs both PageRanks.

    SearchRank scores are the node distribution at each algorithm's first
    maximum. Classical and quantum PageRank use ``cfg.pagerank_alpha``.
    """
    cfg = SweepConfig(**{**asdict(cfg), "kendall": True})
    return run_sweep(cfg, jobs)


def run_alpha_sweep(alphas, N: int = 512, M: int = 6, seed: int = 0, t_max: int | None = None,
                    graph: DirectedGraph | None = None, cfg: SweepConfig | None = None,
                    marked=None) -> list:
    """Peak probability and time of every algorithm for each damping value."""
    cfg = cfg or SweepConfig()
    if any(not 0 <= a <= 1 for a in alphas):
        raise ValueError("alphas must lie in [0, 1]")
    if graph is None:
        graph = make_graph(cfg, N, seed)
    N = graph.n
    oracle = OracleSet(N, tuple(marked)) if marked is not None else draw_marked(cfg.master_seed, N, seed, M)
    M = len(oracle)
    t_max = t_max or cfg.t_max(N, M)
    records = []
    for a in alphas:
        try:
            records += evaluate_curves(cfg, graph, N, M, seed, oracle, float(a), t_max, cfg.algorithms)
        except (ConvergenceError, ValueError) as exc:
            for algo in cfg.algorithms:
                records.append(ResultRecord(N=N, M=M, seed=seed, alpha=float(a), algorithm=algo,
                                            error=f"{type(exc).__name__}: {exc}"))
    return records


# --------------------------------------------------------------------------
# 32-node showcase
# --------------------------------------------------------------------------


def importance_tiers(graph: DirectedGraph, n_main: int = 4):
    """Split nodes into main (top in-degree), secondary (some in-links) and residual."""
    indeg = graph.in_degree()
    order = np.argsort(-indeg, kind="stable")
    main = [int(i) for i in order[:n_main] if indeg[i] > 0]
    secondary = [i for i in range(graph.n) if indeg[i] > 0 and i not in main]
    residual = [i for i in range(graph.n) if indeg[i] == 0]
    return main, secondary, residual


def showcase_marked(graph: DirectedGraph, seed: int = 0) -> OracleSet:
    """One main, one secondary and two residual nodes, chosen at random."""
    main, secondary, residual = importance_tiers(graph)
    if not main or not secondary or len(residual) < 2:
        raise ValueError("graph lacks one of the importance tiers")
    rng = np.random.default_rng(seed)
    picks = [rng.choice(main), rng.choice(secondary), *rng.choice(residual, size=2, replace=False)]
    return OracleSet(graph.n, tuple(int(i) for i in picks))


def showcase(graph: DirectedGraph, oracle: OracleSet, alpha: float = 0.25, pagerank_alpha: float = 0.85,
             t_max: int | None = None) -> dict:
    """Distributions of every algorithm at its first maximum plus both PageRanks."""
    N, M = graph.n, len(oracle)
    t_max = t_max or int(math.ceil(3 * math.sqrt(N / M)))
    curves = searchrank_curves(google_from_graph(graph, alpha), oracle, t_max)
    Gp = google_from_graph(graph, pagerank_alpha)
    out = {"classical_pagerank": classical_pagerank(Gp), "quantum_pagerank": quantum_pagerank(Gp),
           "curves": curves, "peaks": {}}
    for algo, cs in curves.items():
        peak = first_maximum(cs.curve)
        out["peaks"][algo] = peak
        out[algo] = cs.dists[peak.t_star]
    return out


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in records:
            w.writerow([_fmt(getattr(r, name)) for name in CSV_FIELDS])


def read_records_csv(path) -> list:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for k, v in row.items():
                if k in _INT_FIELDS:
                    kw[k] = int(v)
                elif k in _FLOAT_FIELDS:
                    kw[k] = float(v)
                elif k == "boundary":
                    kw[k] = v == "1"
                else:
                    kw[k] = v
            out.append(ResultRecord(**kw))
    return out


def _mean_std(values):
    v = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
    if len(v) == 0:
        return None, None, 0
    return float(v.mean()), float(v.std(ddof=1)) if len(v) > 1 else 0.0, int(len(v))


def _fit_or_none(points, cutoff):
    try:
        return fit_power_law(points, cutoff).as_dict()
    except (InsufficientDataError, ValueError):
        return None


def summarize(records, cutoff: float = 20.0) -> dict:
    """Per-(algorithm, M) aggregates, scaling fits and Kendall means."""
    ok = [r for r in records if r.ok]
    algos = [a for a in ALGORITHMS if any(r.algorithm == a for r in records)]
    groups, fits, kendall = [], {}, []
    has_tau = any(not math.isnan(r.tau_classical) or not math.isnan(r.tau_quantum) for r in ok)
    for algo in algos:
        rs = [r for r in ok if r.algorithm == algo]
        for M in sorted({r.M for r in records if r.algorithm == algo}):
            cell = [r for r in rs if r.M == M]
            asym = [r for r in cell if r.ratio >= cutoff]
            total = sum(1 for r in records if r.algorithm == algo and r.M == M)
            ps = _mean_std([r.p_star for r in cell])
            pr = _mean_std([r.p_ref for r in cell])
            aps = _mean_std([r.p_star for r in asym])
            apr = _mean_std([r.p_ref for r in asym])
            groups.append({"algorithm": algo, "M": M, "cells": total, "errors": total - len(cell),
                           "mean_p_star": ps[0], "std_p_star": ps[1],
                           "mean_p_ref": pr[0], "std_p_ref": pr[1],
                           "asymptotic_cells": aps[2],
                           "asymptotic_mean_p_star": aps[0], "asymptotic_std_p_star": aps[1],
                           "asymptotic_mean_p_ref": apr[0], "asymptotic_std_p_ref": apr[1]})
            for ref in ("classical", "quantum"):
                vals = [getattr(r, f"tau_{ref}") for r in cell]
                m, s, cnt = _mean_std(vals)
                if has_tau:
                    kendall.append({"algorithm": algo, "M": M, "reference": ref, "mean": m, "std": s,
                                    "n": cnt, "missing": len(vals) - cnt})
        fits[algo] = {
            "optimal_time": _fit_or_none([(r.ratio, r.t_star) for r in rs], 0.0),
            "optimal_probability": _fit_or_none([(r.ratio, r.p_star) for r in rs], cutoff),
            "reference_probability": _fit_or_none([(r.ratio, r.p_ref) for r in rs], cutoff),
        }
        asym = [r for r in rs if r.ratio >= cutoff]
        fits[algo]["asymptotic_mean_p_star"] = _mean_std([r.p_star for r in asym])[0]
        fits[algo]["asymptotic_mean_p_ref"] = _mean_std([r.p_ref for r in asym])[0]
    return {"records": len(records), "errors": len(records) - len(ok), "cutoff": cutoff,
            "groups": groups, "fits": fits, "kendall": kendall}


_NUM = {"type": ["number", "null"]}
_FIT = {"type": ["object", "null"],
        "required": ["A", "n", "stderr_A", "stderr_n", "cutoff", "npoints"],
        "properties": {"A": {"type": "number"}, "n": {"type": "number"},
                       "stderr_A": {"type": "number", "minimum": 0}, "stderr_n": {"type": "number", "minimum": 0},
                       "cutoff": {"type": "number"}, "npoints": {"type": "integer", "minimum": 3}}}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["records", "errors", "cutoff", "groups", "fits", "kendall"],
    "properties": {
        "records": {"type": "integer", "minimum": 0},
        "errors": {"type": "integer", "minimum": 0},
        "cutoff": {"type": "number"},
        "groups": {"type": "array", "items": {
            "type": "object",
            "required": ["algorithm", "M", "cells", "errors", "mean_p_star", "mean_p_ref"],
            "properties": {"algorithm": {"enum": list(ALGORITHMS)}, "M": {"type": "integer"},
                           "cells": {"type": "integer"}, "errors": {"type": "integer"},
                           "mean_p_star": _NUM, "mean_p_ref": _NUM}}},
        "fits": {"type": "object", "additionalProperties": {
            "type": "object",
            "required": ["optimal_time", "optimal_probability", "reference_probability"],
            "properties": {"optimal_time": _FIT, "optimal_probability": _FIT, "reference_probability": _FIT}}},
        "kendall": {"type": "array", "items": {
            "type": "object",
            "required": ["algorithm", "M", "reference", "mean", "std", "n", "missing"],
            "properties": {"reference": {"enum": ["classical", "quantum"]}, "mean": _NUM}}},
    },
}


def _write_table(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def emit_outputs(records, path_prefix, cutoff: float = 20.0) -> dict:
    """Write results.csv, summary.json and plot-data CSVs into ``path_prefix``."""
    out = Path(path_prefix)
    out.mkdir(parents=True, exist_ok=True)
    write_records_csv(records, out / "results.csv")
    summary = summarize(records, cutoff)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, allow_nan=False) + "\n")

    ok = [r for r in records if r.ok]
    _write_table(out / "fig_p_star_vs_ratio.csv", ["algorithm", "N", "M", "seed", "ratio", "p_star"],
                 [(r.algorithm, r.N, r.M, r.seed, r.ratio, r.p_star) for r in ok])
    _write_table(out / "fig_t_star_vs_ratio.csv", ["algorithm", "N", "M", "seed", "ratio", "t_star"],
                 [(r.algorithm, r.N, r.M, r.seed, r.ratio, r.t_star) for r in ok])
    _write_table(out / "fig_p_ref_vs_ratio.csv", ["algorithm", "N", "M", "seed", "ratio", "t_ref", "p_ref"],
                 [(r.algorithm, r.N, r.M, r.seed, r.ratio, r.t_ref, r.p_ref) for r in ok])
    _write_table(out / "fig_kendall_vs_N.csv", ["algorithm", "N", "M", "seed", "tau_classical", "tau_quantum"],
                 [(r.algorithm, r.N, r.M, r.seed, r.tau_classical, r.tau_quantum) for r in ok])
    _write_table(out / "fig_kendall_vs_M.csv", ["algorithm", "M", "reference", "mean", "std", "n"],
                 [(k["algorithm"], k["M"], k["reference"], k["mean"], k["std"], k["n"]) for k in summary["kendall"]])
    _write_table(out / "fig_alpha.csv", ["algorithm", "N", "M", "seed", "alpha", "t_star", "p_star"],
                 [(r.algorithm, r.N, r.M, r.seed, r.alpha, r.t_star, r.p_star) for r in ok])
    _write_table(out / "curves.csv", ["algorithm", "N", "M", "seed", "alpha", "tq", "p_marked"],
                 [(r.algorithm, r.N, r.M, r.seed, r.alpha, t, p)
                  for r in records if r.curve for t, p in enumerate(r.curve)])
    return summary
