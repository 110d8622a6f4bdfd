"""Acceptance criteria, each checked at its stated tolerance.

Every test records a single ``CRITERION k: PASS|FAIL`` line that is printed
in pytest's terminal summary (and immediately when run with ``-s``).
Criteria 4 to 7 share one desk-scale sweep, which takes a good few minutes on
a single core.
"""

import math
import time
import tracemalloc

import numpy as np
import pytest

from searchrank.analysis import first_maximum, fit_power_law
from searchrank.google import classical_pagerank, google_from_graph, google_matrix
from searchrank.harness import SweepConfig, importance_tiers, run_alpha_sweep, run_sweep, showcase, showcase_marked, summarize
from searchrank.netgen import generate_scale_free
from searchrank.ranks import quantum_searchrank_curve, semiclassical_matrix
from searchrank.szegedy import OracleSet, Walker, build_sqrt_columns, initial_superposition, psi_state, step_U, step_WQ
from searchrank import szegedy

from . import oracles
from .conftest import ACCEPTANCE_LINES


def report(k, ok, detail):
    line = f"CRITERION {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)
    assert ok, line


# --------------------------------------------------------------------- 1


def test_criterion_01_bruteforce_equivalence():
    rng = np.random.default_rng(1)
    worst = 0.0
    for inst in range(20):
        n = int(rng.integers(2, 9))
        alpha = (0.0, 0.25, 0.85)[inst % 3]
        Gd, edges = oracles.random_stochastic(rng, n, alpha)
        G = google_matrix(oracles.google_dense(edges, n, 1.0), alpha)
        worst = max(worst, np.abs(G.entries - Gd).max())
        sq = build_sqrt_columns(G)
        m = int(rng.integers(0, 3))
        marked = tuple(sorted(rng.choice(n, size=m, replace=False).tolist()))
        oracle = OracleSet(n, marked)
        tmax = 6

        # W_Q on the full state
        ref = oracles.evolve_marginals(Gd, marked, oracles.initial(Gd), tmax)
        W = oracles.w_q(Gd, marked)
        v = oracles.initial(Gd)
        state = initial_superposition(sq)
        for t in range(1, tmax + 1):
            v = W @ v
            state = step_WQ(state, sq, oracle)
            worst = max(worst, np.abs(state.amp.reshape(-1) - v).max())

        # quantum SearchRank marginals
        if m:
            _, dists = quantum_searchrank_curve(G, oracle, tmax)
            worst = max(worst, np.abs(dists - ref).max())

        # semiclassical matrices
        for tq in (1, 2, 5):
            got = semiclassical_matrix(G, oracle, tq).entries
            worst = max(worst, np.abs(got - oracles.semiclassical(Gd, marked, tq)).max())
    report(1, worst <= 1e-10, f"max entrywise deviation {worst:.2e} (tol 1e-10)")


# --------------------------------------------------------------------- 2


def test_criterion_02_unitarity_and_stochasticity():
    rng = np.random.default_rng(2)
    drift = 0.0
    colsum = 0.0
    applications = 0
    while applications < 1000:
        n = int(rng.integers(2, 24))
        alpha = float(rng.random())
        g = generate_scale_free(n, int(rng.integers(1 << 30))) if n >= 3 else None
        G = google_from_graph(g, alpha) if g else google_matrix(np.array([[0.0, 0.5], [1.0, 0.5]]), alpha)
        colsum = max(colsum, np.abs(G.entries.sum(axis=0) - 1).max())
        sq = build_sqrt_columns(G)
        marked = tuple(sorted(rng.choice(n, size=int(rng.integers(0, n)), replace=False).tolist()))
        oracle = OracleSet(n, marked)
        amp = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        state = szegedy.WalkState(amp / np.linalg.norm(amp))
        for _ in range(50):
            op = rng.integers(4)
            if op == 0:
                state = szegedy.apply_reflection(state, sq)
            elif op == 1:
                state = szegedy.apply_swap(state)
            elif op == 2:
                state = step_U(state, sq, oracle)
            else:
                state = step_WQ(state, sq, oracle)
            applications += 1
        drift = max(drift, abs(state.norm() - 1))
        for tq in (1, 3):
            S = semiclassical_matrix(G, oracle, tq).entries
            colsum = max(colsum, np.abs(S.sum(axis=0) - 1).max())
    ok = drift < 1e-9 and colsum <= 1e-10
    report(2, ok, f"{applications} applications, norm drift {drift:.1e} (<1e-9), column-sum error {colsum:.1e} (<=1e-10)")


# --------------------------------------------------------------------- 3


def test_criterion_03_complete_mixing():
    recs = run_alpha_sweep([0.0], N=64, M=6, seed=0)
    peaks = {r.algorithm: r.p_star for r in recs}
    ok = len(peaks) == 3 and all(p >= 0.99 for p in peaks.values())
    report(3, ok, "alpha=0 peaks " + ", ".join(f"{a}={p:.4f}" for a, p in peaks.items()) + " (>=0.99)")


# ----------------------------------------------------------------- 4 - 7


@pytest.fixture(scope="module")
def sweep():
    cfg = SweepConfig(kendall=True)
    records = run_sweep(cfg)
    return records, summarize(records, cfg.asymptotic_cutoff)


@pytest.mark.slow
def test_criterion_04_quantum_depletion(sweep):
    _, summary = sweep
    fit = summary["fits"]["quantum"]["optimal_probability"]
    ok = fit is not None and -1.35 <= fit["n"] <= -0.80
    report(4, ok, f"quantum p_star ~ (N/M)^n with n={fit['n']:.3f} +- {fit['stderr_n']:.3f}, "
                  f"A={fit['A']:.2f}, {fit['npoints']} points (band [-1.35, -0.80])")


@pytest.mark.slow
def test_criterion_05_probability_retention(sweep):
    _, summary = sweep
    sc = summary["fits"]["semiclassical"]["asymptotic_mean_p_ref"]
    rd = summary["fits"]["randomized"]["asymptotic_mean_p_ref"]
    ok = sc is not None and rd is not None and sc >= 0.85 and rd >= 0.80
    report(5, ok, f"mean p_ref at N/M>=20: semiclassical {sc:.3f} (>=0.85), randomized {rd:.3f} (>=0.80)")


@pytest.mark.slow
def test_criterion_06_time_scaling(sweep):
    _, summary = sweep
    parts, ok = [], True
    for algo in ("quantum", "semiclassical", "randomized"):
        fit = summary["fits"][algo]["optimal_time"]
        good = fit is not None and 0.40 <= fit["n"] <= 0.60 and 0.7 <= fit["A"] <= 1.5
        ok &= good
        parts.append(f"{algo} n={fit['n']:.3f} A={fit['A']:.2f}")
    report(6, ok, "; ".join(parts) + " (n in [0.40, 0.60], A in [0.7, 1.5])")


@pytest.mark.slow
def test_criterion_07_kendall(sweep):
    _, summary = sweep
    parts, ok = [], True
    for algo in ("quantum", "semiclassical", "randomized"):
        entries = {e["reference"]: e["mean"] for e in summary["kendall"] if e["algorithm"] == algo and e["M"] == 48}
        c, q = entries.get("classical"), entries.get("quantum")
        good = c is not None and q is not None and 0.45 <= c <= 0.75 and 0.0 <= q <= 0.3
        ok &= good
        parts.append(f"{algo} vs classical {c:.3f}, vs quantum {q:.3f}")
    report(7, ok, "M=48 mean tau: " + "; ".join(parts) + " (classical [0.45, 0.75], quantum [0.0, 0.3])")


# --------------------------------------------------------------------- 8


def test_criterion_08_showcase():
    # fresh graphs: seeds not used anywhere else; skip seeds lacking a tier
    checked, failures = 0, []
    seed = 1000
    while checked < 5:
        seed += 1
        g = generate_scale_free(32, seed)
        try:
            oracle = showcase_marked(g, seed)
        except ValueError:
            continue
        checked += 1
        out = showcase(g, oracle)
        marked = set(oracle.marked)
        cm = sum(out["classical_pagerank"][i] for i in marked)
        qm = sum(out["quantum_pagerank"][i] for i in marked)
        for algo in ("quantum", "semiclassical", "randomized"):
            d = out[algo]
            top4 = set(np.argsort(-d, kind="stable")[:4].tolist())
            mass = sum(d[i] for i in marked)
            if top4 != marked or not (mass > cm and mass > qm):
                failures.append(f"seed {seed} {algo}: top4={sorted(top4)} mass={mass:.3f} vs {cm:.3f}/{qm:.3f}")
    report(8, not failures, f"{checked} fresh 32-node graphs, marked set = top-4 with amplified mass"
                            + ("" if not failures else "; " + "; ".join(failures)))


# --------------------------------------------------------------------- 9


def _step_time(N, repeats=7):
    g = generate_scale_free(N, 9)
    sq = build_sqrt_columns(google_from_graph(g, 0.25))
    w = Walker(sq, OracleSet(N, (0, 1)), sq.rows / math.sqrt(N))
    w.step()
    steps = max(3, int(2e8 / N**3) + int(4e5 / N))
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(steps):
            w.step()
        best = min(best, (time.perf_counter() - t0) / steps)
    return best


def _walk_memory(N):
    g = generate_scale_free(N, 9)
    tracemalloc.start()
    sq = build_sqrt_columns(google_from_graph(g, 0.25))
    w = Walker(sq, OracleSet(N, (0, 1)), sq.rows / math.sqrt(N))
    for _ in range(3):
        w.step()
        w.marginal()
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    return peak


def test_criterion_09_performance():
    sizes = [128, 256, 512, 1024]
    times = [_step_time(N) for N in sizes]
    slope = fit_power_law(list(zip(sizes, times))).n
    per = [_walk_memory(N) / N**2 for N in sizes]
    spread = max(per) / min(per)
    ok = abs(slope - 2.0) <= 0.3 and spread <= 1.5
    report(9, ok, f"step-time slope {slope:.2f} (2.0 +- 0.3), times "
                  + ", ".join(f"{t * 1e3:.3f}ms" for t in times)
                  + f"; memory/N^2 spread {spread:.2f}x (<=1.5x)")


# -------------------------------------------------------------------- 10


def test_criterion_10_fixed_points():
    G = google_matrix(np.array([[0.0, 0.5], [1.0, 0.5]]), 0.85)
    p = classical_pagerank(G)
    exact = np.array([0.5 / 1.425, 0.925 / 1.425])
    err2 = np.abs(p - exact).max()
    g = generate_scale_free(50, 3)
    u = classical_pagerank(google_from_graph(g, 0.0))
    err0 = np.abs(u - 1 / 50).max()
    ok = err2 <= 1e-9 and err0 <= 1e-12
    report(10, ok, f"2-node PageRank ({p[0]:.5f}, {p[1]:.5f}) err {err2:.1e} (<=1e-9); "
                   f"alpha=0 uniform err {err0:.1e} (<=1e-12)")
