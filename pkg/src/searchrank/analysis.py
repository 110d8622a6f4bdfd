"""Peak detection, reference times, power-law fits and Kendall's tau."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


class InsufficientDataError(ValueError):
    pass


class UndefinedCorrelationError(ValueError):
    pass


@dataclass(frozen=True)
class PeakResult:
    t_star: int
    p_star: float
    boundary: bool = False


@dataclass(frozen=True)
class FitResult:
    A: float
    n: float
    stderr_A: float
    stderr_n: float
    cutoff: float
    npoints: int

    def __call__(self, x):
        return self.A * np.asarray(x, dtype=float) ** self.n

    def as_dict(self) -> dict:
        return {"A": self.A, "n": self.n, "stderr_A": self.stderr_A, "stderr_n": self.stderr_n,
                "cutoff": self.cutoff, "npoints": self.npoints}


@dataclass(frozen=True)
class KendallResult:
    tau: float
    pairs: int
    ties_a: int
    ties_b: int
    concordant: int
    discordant: int

    def as_dict(self) -> dict:
        return {"tau": self.tau, "pairs": self.pairs, "ties_a": self.ties_a, "ties_b": self.ties_b}


def first_maximum(curve) -> PeakResult:
    """Earliest local maximum of a probability curve.

    A point qualifies when it is not lower than its predecessor (the first
    point has none) and the next different value is lower; on a plateau the
    earliest time wins. A curve that never drops returns its last point with
    ``boundary=True``.
    """
    t = np.asarray(curve.t)
    p = np.asarray(curve.p)
    if len(t) < 2:
        raise InsufficientDataError("need at least 2 curve points to locate a maximum")
    n = len(p)
    for i in range(n):
        if i > 0 and p[i] < p[i - 1]:
            continue
        if i > 0 and p[i] == p[i - 1]:
            # already examined as part of this plateau
            continue
        j = i
        while j + 1 < n and p[j + 1] == p[i]:
            j += 1
        if j + 1 < n and p[j + 1] < p[i]:
            return PeakResult(int(t[i]), float(p[i]))
    return PeakResult(int(t[-1]), float(p[-1]), boundary=True)


def global_maximum(curve) -> PeakResult:
    """Highest point of the curve, earliest on ties.

    Unlike :func:`first_maximum` this ignores small early wiggles, at the price
    of depending on how far the curve was computed. ``boundary`` is set when
    the maximum is the last point.
    """
    t = np.asarray(curve.t)
    p = np.asarray(curve.p)
    if len(t) < 2:
        raise InsufficientDataError("need at least 2 curve points to locate a maximum")
    i = int(np.argmax(p))
    return PeakResult(int(t[i]), float(p[i]), boundary=i == len(p) - 1)


def reference_time(N: int, M: int) -> int:
    """``sqrt(N/M)`` rounded half away from zero, at least 1."""
    if N < 1 or not 1 <= M <= N:
        raise ValueError(f"need N >= 1 and 1 <= M <= N, got N={N}, M={M}")
    return max(1, int(math.floor(math.sqrt(N / M) + 0.5)))


def fit_power_law(points, cutoff: float = 0.0) -> FitResult:
    """Least-squares fit of ``y = A x^n`` as a straight line in log-log space.

    Only points with ``x >= cutoff`` are used. Standard errors are the
    ordinary regression ones; ``stderr_A`` is propagated from the intercept.
    """
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    pts = pts[pts[:, 0] >= cutoff]
    if len(pts) < 3:
        raise InsufficientDataError(f"need >= 3 points with x >= {cutoff}, got {len(pts)}")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("power-law fit needs strictly positive x and y")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) == 0:
        raise InsufficientDataError("all usable points share the same x")
    res = stats.linregress(lx, ly)
    A = math.exp(res.intercept)
    se_n = float(res.stderr) if np.isfinite(res.stderr) else 0.0
    se_b = float(res.intercept_stderr) if np.isfinite(res.intercept_stderr) else 0.0
    return FitResult(A=A, n=float(res.slope), stderr_A=A * se_b, stderr_n=se_n,
                     cutoff=float(cutoff), npoints=len(pts))


def _same(u, v, rtol):
    if rtol == 0.0:
        return u == v
    return abs(u - v) <= rtol * max(abs(u), abs(v))


def kendall_tau(a, b, rtol: float = 0.0) -> KendallResult:
    """Tie-corrected Kendall tau-b between two score lists over the same items.

    Scores within relative distance ``rtol`` count as tied.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("score lists must be 1-d and of equal length")
    if len(a) < 2:
        raise InsufficientDataError("need at least 2 items")
    n = len(a)
    conc = disc = ties_a = ties_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            ta = _same(a[i], a[j], rtol)
            tb = _same(b[i], b[j], rtol)
            ties_a += bool(ta)
            ties_b += bool(tb)
            if ta or tb:
                continue
            if (a[i] < a[j]) == (b[i] < b[j]):
                conc += 1
            else:
                disc += 1
    pairs = n * (n - 1) // 2
    denom = math.sqrt((pairs - ties_a) * (pairs - ties_b))
    if denom == 0:
        raise UndefinedCorrelationError("a score list is entirely tied; tau-b is undefined")
    return KendallResult((conc - disc) / denom, pairs, ties_a, ties_b, conc, disc)
