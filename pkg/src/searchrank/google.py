"""Connectivity, patched and Google matrices; classical PageRank."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netgen import DirectedGraph


class ParameterError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual, iterations):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class GoogleMatrix:
    """Column-stochastic transition matrix; ``entries[k, i]`` is P(i -> k)."""

    alpha: float
    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def connectivity_matrix(g: DirectedGraph) -> np.ndarray:
    n = g.n
    h = np.zeros((n, n))
    out = g.out_degree()
    for s, d in g.edges:
        h[d, s] = 1.0 / out[s]
    return h


def patch_dangling(h: np.ndarray) -> np.ndarray:
    """Replace every all-zero column with the uniform column 1/N."""
    e = np.array(h, dtype=float, copy=True)
    dangling = ~e.any(axis=0)
    e[:, dangling] = 1.0 / e.shape[0]
    return e


def google_matrix(e: np.ndarray, alpha: float) -> GoogleMatrix:
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    n = e.shape[0]
    g = alpha * np.asarray(e, dtype=float) + (1.0 - alpha) / n
    return GoogleMatrix(alpha=float(alpha), entries=g)


def google_from_graph(g: DirectedGraph, alpha: float) -> GoogleMatrix:
    return google_matrix(patch_dangling(connectivity_matrix(g)), alpha)


def power_iterate(matrix: np.ndarray, p0: np.ndarray, tol: float, max_iter: int, trajectory=None):
    """Iterate ``p <- M p`` until the L1 residual drops to ``tol``.

    Returns ``(p, iterations)``. The iterate is renormalised every step.
    ``trajectory``, when a list, receives every iterate including ``p0``.
    """
    if tol <= 0:
        raise ParameterError("tol must be > 0")
    p = np.asarray(p0, dtype=float)
    p = p / p.sum()
    if trajectory is not None:
        trajectory.append(p.copy())
    for it in range(max_iter + 1):
        q = matrix @ p
        q /= q.sum()
        residual = np.abs(q - p).sum()
        if residual <= tol:
            return p, it
        if it == max_iter:
            break
        p = q
        if trajectory is not None:
            trajectory.append(p.copy())
    raise ConvergenceError("power iteration did not converge", residual, max_iter)


def classical_pagerank(G: GoogleMatrix, tol: float = 1e-10, max_iter: int = 10_000, start=None) -> np.ndarray:
    n = G.n
    p0 = np.full(n, 1.0 / n) if start is None else start
    p, _ = power_iterate(G.entries, p0, tol, max_iter)
    return p
