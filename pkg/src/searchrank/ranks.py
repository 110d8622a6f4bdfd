"""Quantum PageRank and the quantum, semiclassical and randomized SearchRank.

Quantum time ``t_q`` always counts applications of ``W_Q = U_Q^2``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .google import ConvergenceError, GoogleMatrix, ParameterError, power_iterate
from .szegedy import (
    OracleSet,
    SqrtColumns,
    Walker,
    build_sqrt_columns,
    evolve_psi_columns,
    psi_state,
    step_U,
    marginal_register2,
)

ALGORITHMS = ("quantum", "semiclassical", "randomized")


@dataclass(frozen=True)
class ProbabilityCurve:
    """Marked-set probability at quantum times ``t[0] < t[1] < ...``."""

    t: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64)
        p = np.asarray(self.p, dtype=float)
        if t.shape != p.shape or t.ndim != 1:
            raise ValueError("t and p must be 1-d arrays of equal length")
        if len(t) and (t[0] < 1 or np.any(np.diff(t) <= 0)):
            raise ValueError("quantum times must start at >= 1 and strictly increase")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p", np.clip(p, 0.0, 1.0))

    def __len__(self):
        return len(self.t)

    def at(self, tq: int) -> float:
        idx = np.searchsorted(self.t, tq)
        if idx == len(self.t) or self.t[idx] != tq:
            raise KeyError(tq)
        return float(self.p[idx])


@dataclass(frozen=True)
class SemiclassicalMatrix:
    tq: int
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass
class SemiclassicalResult:
    dist: np.ndarray
    tc_star: int
    trajectory: list | None = None


@dataclass
class CurveSet:
    """Output of one SearchRank algorithm over ``t_q = 0..t_max``.

    ``dists[t]`` is the full node distribution at quantum time ``t``;
    ``dists[0]`` is the unevolved reference and is not part of ``curve``.
    """

    algorithm: str
    curve: ProbabilityCurve
    dists: np.ndarray
    tc_star: np.ndarray | None = None
    p0: float = 0.0
    errors: dict = field(default_factory=dict)


def _sqrt(G):
    return G if isinstance(G, SqrtColumns) else build_sqrt_columns(G)


def marked_mass(dist: np.ndarray, oracle: OracleSet) -> float:
    return float(np.sum(dist[list(oracle.marked)]))


# --------------------------------------------------------------------------
# quantum PageRank
# --------------------------------------------------------------------------


def _initial_amp(sq: SqrtColumns) -> np.ndarray:
    return sq.rows / np.sqrt(sq.n)


def quantum_pagerank(G: GoogleMatrix, steps: int = 1000) -> np.ndarray:
    """Average register-2 distribution of ``W^t |Psi0>`` over ``t = 0..steps``."""
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    sq = _sqrt(G)
    walker = Walker(sq, None, _initial_amp(sq))
    total = walker.marginal()
    for _ in range(steps):
        walker.step()
        total += walker.marginal()
    return total / (steps + 1)


def quantum_pagerank_converged(G: GoogleMatrix, max_steps: int = 1000, tol: float = 1e-6, window: int = 50):
    """Like :func:`quantum_pagerank` but stops once the running average settles.

    Returns ``(distribution, effective_T)``; the average is considered settled
    when its L1 change over the last ``window`` steps is below ``tol``.
    """
    sq = _sqrt(G)
    walker = Walker(sq, None, _initial_amp(sq))
    total = walker.marginal()
    checkpoint = total.copy()
    for t in range(1, max_steps + 1):
        walker.step()
        total += walker.marginal()
        if t % window == 0:
            avg = total / (t + 1)
            if np.abs(avg - checkpoint).sum() < tol:
                return avg, t
            checkpoint = avg
    return total / (max_steps + 1), max_steps


# --------------------------------------------------------------------------
# quantum SearchRank
# --------------------------------------------------------------------------


def quantum_searchrank_curve(G: GoogleMatrix, oracle: OracleSet, t_max: int):
    """Evolve ``|Psi0>`` under ``W_Q`` for ``t_max`` steps.

    Returns ``(curve, dists)`` where ``dists[t]`` is the register-2
    distribution at quantum time ``t`` (row 0 is the unevolved state).
    """
    if len(oracle) == 0:
        raise ParameterError("quantum SearchRank needs a non-empty oracle; use quantum_pagerank")
    if t_max < 1:
        raise ParameterError("t_max must be >= 1")
    sq = _sqrt(G)
    walker = Walker(sq, oracle, _initial_amp(sq))
    dists = np.empty((t_max + 1, sq.n))
    dists[0] = walker.marginal()
    for t in range(1, t_max + 1):
        walker.step()
        dists[t] = walker.marginal()
    p = dists[1:, list(oracle.marked)].sum(axis=1)
    return ProbabilityCurve(np.arange(1, t_max + 1), p), dists


# --------------------------------------------------------------------------
# semiclassical matrices and SearchRank
# --------------------------------------------------------------------------


def semiclassical_matrix(G: GoogleMatrix, oracle: OracleSet | None, tq: int) -> SemiclassicalMatrix:
    """Transition matrix with entry (j, i) = ||<j|_2 W_Q^tq |psi_i>||^2."""
    if tq < 0:
        raise ParameterError("tq must be >= 0")
    if tq == 0:
        return SemiclassicalMatrix(0, np.array(G.entries, copy=True))
    mats = evolve_psi_columns(_sqrt(G), oracle, tq)
    return SemiclassicalMatrix(tq, mats[tq])


def single_u_matrix(G: GoogleMatrix, oracle: OracleSet | None = None) -> np.ndarray:
    """Semiclassical matrix for one bare ``U_Q`` (not ``W_Q``); a test helper."""
    sq = _sqrt(G)
    cols = [marginal_register2(step_U(psi_state(sq, i), sq, oracle)) for i in range(sq.n)]
    return np.stack(cols, axis=1)


def stationary_distribution(matrix, tol: float = 1e-8, max_steps: int = 10_000, initial=None,
                            keep_trajectory: bool = False) -> SemiclassicalResult:
    entries = matrix.entries if isinstance(matrix, SemiclassicalMatrix) else np.asarray(matrix)
    n = entries.shape[0]
    p0 = np.full(n, 1.0 / n) if initial is None else np.asarray(initial, dtype=float)
    trajectory = [] if keep_trajectory else None
    dist, steps = power_iterate(entries, p0, tol, max_steps, trajectory)
    return SemiclassicalResult(dist, steps, trajectory)


def semiclassical_searchrank(G: GoogleMatrix, oracle: OracleSet | None, tq: int, tol: float = 1e-8,
                             max_steps: int = 10_000, initial=None,
                             keep_trajectory: bool = False) -> SemiclassicalResult:
    """Stationary distribution of the semiclassical matrix at quantum time ``tq``.

    Runs the classical walk from ``initial`` (uniform by default) until the L1
    residual is at most ``tol``; ``tc_star`` counts the classical steps taken.
    """
    m = semiclassical_matrix(G, oracle, tq)
    return stationary_distribution(m, tol, max_steps, initial, keep_trajectory)


def randomized_searchrank(G: GoogleMatrix, oracle: OracleSet | None, tq: int) -> np.ndarray:
    """One classical step of the semiclassical walk from the uniform distribution.

    Equivalent to evolving the mixed state ``(1/N) sum_i |psi_i><psi_i|``.
    """
    if tq < 1:
        raise ParameterError("tq must be >= 1")
    m = semiclassical_matrix(G, oracle, tq)
    return m.entries @ np.full(m.n, 1.0 / m.n)


# --------------------------------------------------------------------------
# all curves in one pass
# --------------------------------------------------------------------------


def searchrank_curves(G: GoogleMatrix, oracle: OracleSet, t_max: int, which=ALGORITHMS,
                      tol: float = 1e-8, max_steps: int = 10_000) -> dict:
    """Marked-set probability curves for the selected algorithms.

    The semiclassical and randomized curves share a single pass over the
    proxy states: every ``psi_i`` is evolved once up to ``t_max`` and its
    register-2 marginal recorded at every step. A semiclassical fixed point
    that fails to converge is recorded in ``errors`` and its point set to NaN.
    """
    which = tuple(which)
    unknown = set(which) - set(ALGORITHMS)
    if unknown:
        raise ParameterError(f"unknown algorithms {sorted(unknown)}")
    if t_max < 1:
        raise ParameterError("t_max must be >= 1")
    sq = _sqrt(G)
    marked = list(oracle.marked)
    ts = np.arange(1, t_max + 1)
    out = {}

    if "quantum" in which:
        curve, dists = quantum_searchrank_curve(sq, oracle, t_max)
        out["quantum"] = CurveSet("quantum", curve, dists, p0=float(dists[0, marked].sum()))

    if "semiclassical" in which or "randomized" in which:
        mats = evolve_psi_columns(sq, oracle, t_max)
        n = sq.n
        uniform = np.full(n, 1.0 / n)
        if "randomized" in which:
            dists = mats @ uniform
            out["randomized"] = CurveSet("randomized", ProbabilityCurve(ts, dists[1:, marked].sum(axis=1)),
                                         dists, p0=float(dists[0, marked].sum()))
        if "semiclassical" in which:
            dists = np.full((t_max + 1, n), np.nan)
            tc = np.full(t_max + 1, -1, dtype=np.int64)
            errors = {}
            for t in range(t_max + 1):
                try:
                    res = stationary_distribution(mats[t], tol, max_steps)
                except ConvergenceError as exc:
                    errors[t] = str(exc)
                    continue
                dists[t] = res.dist
                tc[t] = res.tc_star
            p = dists[1:, marked].sum(axis=1)
            curve = _nan_tolerant_curve(ts, p)
            out["semiclassical"] = CurveSet("semiclassical", curve, dists, tc_star=tc,
                                            p0=float(dists[0, marked].sum()), errors=errors)
    return out


def _nan_tolerant_curve(ts, p):
    ok = ~np.isnan(p)
    return ProbabilityCurve(ts[ok], p[ok])


# --------------------------------------------------------------------------
# weighted-graph export
# --------------------------------------------------------------------------


def export_weighted_graph(m, path) -> None:
    """Write ``src,dst,weight`` rows with weight = entry (dst, src)."""
    entries = m.entries if hasattr(m, "entries") else np.asarray(m)
    n = entries.shape[0]
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "weight"])
        for src in range(n):
            for dst in range(n):
                weight = entries[dst, src]
                if weight != 0.0:
                    w.writerow([src, dst, repr(float(weight))])


def load_weighted_graph(path, n: int | None = None) -> np.ndarray:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append((int(rec["src"]), int(rec["dst"]), float(rec["weight"])))
    size = n if n is not None else 1 + max(max(s, d) for s, d, _ in rows)
    m = np.zeros((size, size))
    for s, d, w in rows:
        m[d, s] = w
    return m
