"""Directed graphs: scale-free generation and edge-list persistence.

The generator follows the directed preferential-attachment model of
Bollobás, Borgs, Chayes and Riordan (2003), as popularised by
``networkx.scale_free_graph``. Randomness comes from numpy's PCG64 bit
generator, so a given ``(n, seed, params)`` triple yields the same graph on
every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GraphParamError(ValueError):
    pass


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


@dataclass(frozen=True)
class DirectedGraph:
    """Simple digraph on nodes ``0..n-1``."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise GraphParamError(f"node count must be >= 1, got {self.n}")
        edges = frozenset((int(s), int(d)) for s, d in self.edges)
        for s, d in edges:
            if not (0 <= s < self.n and 0 <= d < self.n):
                raise GraphParamError(f"edge ({s}, {d}) out of range for n={self.n}")
            if s == d:
                raise GraphParamError(f"self-loop at node {s}")
        object.__setattr__(self, "edges", edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def in_degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for _, d in self.edges:
            deg[d] += 1
        return deg

    def out_degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for s, _ in self.edges:
            deg[s] += 1
        return deg


@dataclass(frozen=True)
class ScaleFreeParams:
    a: float = 0.41
    b: float = 0.54
    g: float = 0.05
    delta_in: float = 0.2
    delta_out: float = 0.0

    def validate(self):
        for name in ("a", "b", "g"):
            if getattr(self, name) < 0:
                raise GraphParamError(f"probability {name} must be >= 0")
        if abs(self.a + self.b + self.g - 1.0) > 1e-9:
            raise GraphParamError(f"a + b + g must equal 1, got {self.a + self.b + self.g!r}")
        if self.delta_in < 0 or self.delta_out < 0:
            raise GraphParamError("offsets delta_in and delta_out must be >= 0")


def _choose(rng, endpoints, nnodes, delta):
    """Pick a node with probability proportional to (degree + delta).

    ``endpoints`` lists one entry per edge endpoint, so uniform choice from it
    is degree-proportional; the offset is a uniform choice among all nodes.
    """
    if delta > 0:
        bias = nnodes * delta
        if rng.random() < bias / (bias + len(endpoints)):
            return int(rng.integers(nnodes))
    return endpoints[int(rng.integers(len(endpoints)))]


def generate_scale_free(n: int, seed: int = 0, params: ScaleFreeParams | None = None) -> DirectedGraph:
    """Grow a directed scale-free graph with exactly ``n`` nodes.

    Starts from the directed 3-cycle (truncated when ``n < 3``) and repeats
    one of three moves until ``n`` nodes exist:

    * with prob. ``a``: new node -> existing node chosen by in-degree;
    * with prob. ``b``: existing (by out-degree) -> existing (by in-degree);
    * with prob. ``g``: existing node chosen by out-degree -> new node.

    The multigraph this produces is collapsed to a simple digraph: parallel
    edges merge and self-loops are dropped.
    """
    params = params or ScaleFreeParams()
    params.validate()
    if n < 1:
        raise GraphParamError(f"node count must be >= 1, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))

    n0 = min(n, 3)
    multi = [(i, (i + 1) % n0) for i in range(n0)] if n0 > 1 else []
    sources = [s for s, _ in multi]
    targets = [d for _, d in multi]
    nnodes = n0

    while nnodes < n:
        r = rng.random()
        if r < params.a:
            v = nnodes
            nnodes += 1
            w = _choose(rng, targets, nnodes - 1, params.delta_in)
        elif r < params.a + params.b:
            v = _choose(rng, sources, nnodes, params.delta_out)
            w = _choose(rng, targets, nnodes, params.delta_in)
        else:
            v = _choose(rng, sources, nnodes, params.delta_out)
            w = nnodes
            nnodes += 1
        sources.append(v)
        targets.append(w)

    edges = {(s, d) for s, d in zip(sources, targets) if s != d}
    return DirectedGraph(n, frozenset(edges))


def store_edge_list(g: DirectedGraph, path) -> None:
    lines = [f"# nodes {g.n}"] + [f"{s} {d}" for s, d in g.sorted_edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def load_edge_list(path) -> DirectedGraph:
    text = Path(path).read_text(encoding="ascii")
    n = None
    edges = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].split()
            if n is None and len(body) == 2 and body[0] == "nodes":
                try:
                    n = int(body[1])
                except ValueError:
                    raise EdgeListParseError(lineno, raw, "bad node count") from None
                if n < 1:
                    raise EdgeListParseError(lineno, raw, "node count must be >= 1")
            continue
        if n is None:
            raise EdgeListParseError(lineno, raw, "edge before '# nodes N' header")
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, raw, "expected 'src dst'")
        try:
            s, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, raw, "non-integer node index") from None
        if not (0 <= s < n and 0 <= d < n):
            raise EdgeListParseError(lineno, raw, f"node index out of range [0, {n})")
        if s == d:
            raise EdgeListParseError(lineno, raw, "self-loop")
        if (s, d) in edges:
            raise EdgeListParseError(lineno, raw, "duplicate edge")
        edges.add((s, d))
    if n is None:
        raise EdgeListParseError(1, text.split("\n", 1)[0], "missing '# nodes N' header")
    return DirectedGraph(n, frozenset(edges))


def top_decile_in_share(g: DirectedGraph) -> float:
    """Fraction of in-edges landing on the 10% highest in-degree nodes."""
    deg = np.sort(g.in_degree())[::-1]
    k = max(1, math.ceil(g.n / 10))
    total = deg.sum()
    return float(deg[:k].sum() / total) if total else 0.0
