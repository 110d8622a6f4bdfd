"""Dense O(N^2) simulation of Szegedy walks with an optional search oracle.

A walk state on C^N (x) C^N is stored as an N x N matrix whose row index is
register 1 and column index is register 2. In that layout the reflection
``R = 2 Pi - 1`` acts row by row (one dot product and one rank-1 update per
row), the swap is a transpose and the oracle on register 1 negates rows, so
no N^2 x N^2 operator is ever built.

Google matrices built from a graph have an extra structure: each column of
``sqrt(G)`` is constant except on the node's out-links. When that holds (see
:attr:`SqrtColumns.split`) a full step touches only the amplitudes plus
O(edges) coefficients, which keeps large walks out of the memory bottleneck.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .google import GoogleMatrix


# use the split form while at most this fraction of entries deviates
SPLIT_MAX_FILL = 0.5


class SparseSplit(NamedTuple):
    """``rows[i, k] = lo[i] + val[p]`` for ``k = idx[p]``, ``p`` in ``ptr[i]:ptr[i+1]``, else ``lo[i]``."""

    lo: np.ndarray
    ptr: np.ndarray
    idx: np.ndarray
    val: np.ndarray


def split_rows(rows: np.ndarray, max_fill: float = SPLIT_MAX_FILL) -> SparseSplit | None:
    """Row-constant plus sparse decomposition of ``rows``, or None if too dense."""
    n = rows.shape[0]
    lo = rows.min(axis=1)
    mask = rows != lo[:, None]
    nnz = int(mask.sum())
    if nnz > max_fill * n * n:
        return None
    ii, kk = np.nonzero(mask)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(mask.sum(axis=1), out=ptr[1:])
    return SparseSplit(lo, ptr, kk.astype(np.int64), rows[ii, kk] - lo[ii])


@dataclass(frozen=True)
class SqrtColumns:
    """Entrywise square root of a Google matrix, ``s[k, i] = sqrt(G[k, i])``."""

    s: np.ndarray

    @property
    def n(self) -> int:
        return self.s.shape[0]

    @property
    def rows(self) -> np.ndarray:
        """``s`` transposed and contiguous, the layout the kernels expect."""
        try:
            return self._rows
        except AttributeError:
            rows = np.ascontiguousarray(self.s.T)
            object.__setattr__(self, "_rows", rows)
            return rows

    @property
    def split(self) -> SparseSplit | None:
        try:
            return self._split
        except AttributeError:
            sp = split_rows(self.rows)
            object.__setattr__(self, "_split", sp)
            return sp


@dataclass
class WalkState:
    amp: np.ndarray

    @property
    def n(self) -> int:
        return self.amp.shape[0]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp) ** 2)))

    def copy(self) -> "WalkState":
        return WalkState(self.amp.copy())


@dataclass(frozen=True)
class OracleSet:
    """Marked nodes; an empty set makes the oracle the identity."""

    n: int
    marked: tuple = ()

    def __post_init__(self):
        m = tuple(sorted(int(i) for i in self.marked))
        if len(set(m)) != len(m):
            raise ValueError(f"duplicate marked nodes in {self.marked}")
        for i in m:
            if not 0 <= i < self.n:
                raise IndexError(f"marked node {i} out of range [0, {self.n})")
        object.__setattr__(self, "marked", m)

    def __len__(self):
        return len(self.marked)

    def signs(self) -> np.ndarray:
        sign = np.ones(self.n)
        sign[list(self.marked)] = -1.0
        return sign


def _check_dims(state: WalkState, n: int):
    if state.amp.shape != (n, n):
        raise ValueError(f"state shape {state.amp.shape} does not match dimension {n}")


def build_sqrt_columns(G: GoogleMatrix) -> SqrtColumns:
    return SqrtColumns(np.sqrt(G.entries))


def psi_state(sq: SqrtColumns, i: int) -> WalkState:
    if not 0 <= i < sq.n:
        raise IndexError(f"node {i} out of range [0, {sq.n})")
    amp = np.zeros((sq.n, sq.n), dtype=complex)
    amp[i] = sq.s[:, i]
    return WalkState(amp)


def initial_superposition(sq: SqrtColumns) -> WalkState:
    return WalkState(sq.rows.astype(complex) / np.sqrt(sq.n))


def apply_reflection(state: WalkState, sq: SqrtColumns) -> WalkState:
    _check_dims(state, sq.n)
    return WalkState(_kernels.reflect(state.amp, sq.rows))


def apply_swap(state: WalkState) -> WalkState:
    return WalkState(np.ascontiguousarray(state.amp.T))


def apply_oracle(state: WalkState, oracle: OracleSet) -> WalkState:
    _check_dims(state, oracle.n)
    amp = state.amp.copy()
    amp[list(oracle.marked)] *= -1
    return WalkState(amp)


def _wq_inplace(amp, sq, sign, buf=None):
    sp = sq.split
    if sp is None:
        _kernels.wq_step(amp, sq.rows, sign, np.empty_like(amp) if buf is None else buf)
    else:
        _kernels.wq_step_split(amp, sp.lo, sp.ptr, sp.idx, sp.val, sign,
                               np.empty(sq.n, dtype=amp.dtype) if buf is None else buf)
    return amp


def step_WQ(state: WalkState, sq: SqrtColumns, oracle: OracleSet | None = None) -> WalkState:
    """One application of ``W_Q = (S Q1 R)^2``; the bare ``W = U^2`` if no oracle."""
    _check_dims(state, sq.n)
    sign = oracle.signs() if oracle is not None else np.ones(sq.n)
    amp = np.array(state.amp, dtype=complex, order="C", copy=True)
    _wq_inplace(amp, sq, sign)
    return WalkState(amp)


def step_U(state: WalkState, sq: SqrtColumns, oracle: OracleSet | None = None) -> WalkState:
    """A single ``U_Q = S Q1 R`` (half a physical step)."""
    _check_dims(state, sq.n)
    sign = oracle.signs() if oracle is not None else np.ones(sq.n)
    amp = np.ascontiguousarray(state.amp, dtype=complex)
    return WalkState(_kernels.uq_step(amp, sq.rows, sign, np.empty_like(amp)))


def marginal_register2(state: WalkState) -> np.ndarray:
    return _kernels.marginal(np.ascontiguousarray(state.amp))


class Walker:
    """In-place evolution of one state; reuses its scratch buffer.

    Works on real amplitudes by default since every operator here is real.
    """

    def __init__(self, sq: SqrtColumns, oracle: OracleSet | None, amp: np.ndarray):
        self.sq = sq
        self.sign = oracle.signs() if oracle is not None else np.ones(sq.n)
        self.amp = np.array(amp, order="C", copy=True)
        if sq.split is None:
            self.buf = np.empty_like(self.amp)
        else:
            self.buf = np.empty(sq.n, dtype=self.amp.dtype)

    def step(self):
        _wq_inplace(self.amp, self.sq, self.sign, self.buf)

    def marginal(self) -> np.ndarray:
        return _kernels.marginal(self.amp)


def evolve_psi_columns(sq: SqrtColumns, oracle: OracleSet | None, tmax: int) -> np.ndarray:
    """Register-2 marginals of every ``W_Q^t |psi_i>`` for ``t = 0..tmax``.

    Returns an array ``out`` with ``out[t, j, i] = ||<j|_2 W_Q^t |psi_i>||^2``,
    so ``out[t]`` is the semiclassical transition matrix at quantum time t.
    Only one or a few N x N working states are alive at any time.
    """
    sign = oracle.signs() if oracle is not None else np.ones(sq.n)
    sp = sq.split
    if sp is None:
        return _kernels.evolve_columns(sq.rows, sign, int(tmax))
    return _kernels.evolve_columns_split(sp.lo, sp.ptr, sp.idx, sp.val, sign, int(tmax))
