"""Hot loops of the Szegedy walk simulation.

Every kernel exists twice: a numba ``@njit`` version and a vectorised numpy
version with the same signature. ``BACKEND`` picks one at import time.
Set ``SEARCHRANK_DISABLE_NUMBA=1`` (or run without numba installed) to get
the pure-numpy path.

Layout convention: ``amp[i, k]`` is the amplitude of ``|i>_1 |k>_2``.
``sqT[i, k] = sqrt(G[k, i])``, i.e. row ``i`` of ``sqT`` is the square root
of column ``i`` of the Google matrix, so the reflection is row-local.
``sign[i]`` is -1 for marked nodes, +1 otherwise.

The ``*_split`` kernels use the shape of a Google matrix built from a graph:
every row of ``sqT`` is a constant ``lo[i]`` except on the node's out-links,
where it is ``lo[i] + val[p]`` for ``p`` in ``ptr[i]:ptr[i+1]`` at column
``idx[p]``. With ``S^2 = 1`` one step ``(S Q1 R)^2`` equals
``Q2 R2 Q1 R1``, where ``R2``/``Q2`` act on register 2. Both reflections
then reduce to row or column sums of ``amp`` plus sparse corrections, so no
transpose is needed and only ``amp`` itself is streamed through memory.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("SEARCHRANK_DISABLE_NUMBA", "") not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"

# rows handled together when writing the transposed output
_BLOCK = 16
# initial states evolved together by the numpy batch path
_NUMPY_BATCH = 16


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _reflect_np(amp, sqT):
    c = np.einsum("ik,ik->i", sqT, amp)
    return 2.0 * c[:, None] * sqT - amp


def _uq_np(src, sqT, sign, dst):
    """dst <- S Q1 R src."""
    r = _reflect_np(src, sqT)
    r *= sign[:, None]
    dst[...] = r.T
    return dst


def _wq_np(amp, sqT, sign, buf):
    _uq_np(amp, sqT, sign, buf)
    _uq_np(buf, sqT, sign, amp)
    return amp


def _evolve_columns_np(sqT, sign, tmax, out):
    """Evolve every psi_i and record register-2 marginals.

    ``out[t, j, i] = || <j|_2 W_Q^t |psi_i> ||^2`` for ``t = 0..tmax``.
    """
    n = sqT.shape[0]
    out[0] = sqT.T ** 2
    for start in range(0, n, _NUMPY_BATCH):
        idx = np.arange(start, min(start + _NUMPY_BATCH, n))
        b = len(idx)
        amp = np.zeros((b, n, n))
        amp[np.arange(b), idx, :] = sqT[idx]
        s = sign[None, :, None]
        for t in range(1, tmax + 1):
            for _ in range(2):
                c = np.einsum("bik,ik->bi", amp, sqT)
                amp = (2.0 * c[:, :, None] * sqT[None] - amp) * s
                amp = np.ascontiguousarray(amp.transpose(0, 2, 1))
            out[t, :, start:start + b] = np.einsum("bij,bij->jb", amp, amp)
    return out


def _segsum(x, seg, n):
    if np.iscomplexobj(x):
        return np.bincount(seg, x.real, n) + 1j * np.bincount(seg, x.imag, n)
    return np.bincount(seg, x, n)


def _wq_split_np(amp, lo, ptr, idx, val, sign, col):
    n = amp.shape[0]
    ri = np.repeat(np.arange(n), np.diff(ptr))
    d = lo * amp.sum(axis=1) + _segsum(val * amp[ri, idx], ri, n)
    amp *= -1.0
    amp += (2.0 * d * lo)[:, None]
    amp[ri, idx] += 2.0 * d[ri] * val
    amp *= sign[:, None]
    c = lo * amp.sum(axis=0) + _segsum(val * amp[idx, ri], ri, n)
    amp *= -1.0
    amp += (2.0 * c * lo)[None, :]
    amp[idx, ri] += 2.0 * c[ri] * val
    amp *= sign[None, :]
    return amp


def _evolve_columns_split_np(lo, ptr, idx, val, sign, tmax, out):
    n = lo.shape[0]
    rows = np.repeat(lo[:, None], n, axis=1)
    rows[np.repeat(np.arange(n), np.diff(ptr)), idx] += val
    out[0] = rows.T ** 2
    col = np.empty(n)
    for i in range(n):
        amp = np.zeros((n, n))
        amp[i] = rows[i]
        for t in range(1, tmax + 1):
            _wq_split_np(amp, lo, ptr, idx, val, sign, col)
            out[t, :, i] = np.einsum("ij,ij->j", amp, amp)
    return out


def _marginal_np(amp):
    return np.sum(np.abs(amp) ** 2, axis=0)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=True)
    def _reflect_nb(amp, sqT):
        n = amp.shape[0]
        out = np.empty_like(amp)
        for i in range(n):
            c = amp[i, 0] * 0.0
            for k in range(n):
                c += sqT[i, k] * amp[i, k]
            c2 = 2.0 * c
            for k in range(n):
                out[i, k] = c2 * sqT[i, k] - amp[i, k]
        return out

    @numba.njit(cache=True, fastmath=True)
    def _uq_nb(src, sqT, sign, dst):
        n = src.shape[0]
        coef = np.empty(_BLOCK, dtype=src.dtype)
        for i0 in range(0, n, _BLOCK):
            i1 = min(i0 + _BLOCK, n)
            for i in range(i0, i1):
                c = src[i, 0] * 0.0
                for k in range(n):
                    c += sqT[i, k] * src[i, k]
                coef[i - i0] = 2.0 * c
            for k in range(n):
                for i in range(i0, i1):
                    dst[k, i] = sign[i] * (coef[i - i0] * sqT[i, k] - src[i, k])
        return dst

    @numba.njit(cache=True, fastmath=True)
    def _wq_nb(amp, sqT, sign, buf):
        _uq_nb(amp, sqT, sign, buf)
        _uq_nb(buf, sqT, sign, amp)
        return amp

    @numba.njit(cache=True, fastmath=True)
    def _marginal_nb(amp):
        n = amp.shape[0]
        p = np.zeros(n)
        for i in range(n):
            for j in range(n):
                v = amp[i, j]
                p[j] += v.real * v.real + v.imag * v.imag
        return p

    @numba.njit(cache=True, fastmath=True)
    def _evolve_columns_nb(sqT, sign, tmax, out):
        n = sqT.shape[0]
        amp = np.empty((n, n))
        buf = np.empty((n, n))
        p = np.empty(n)
        for i in range(n):
            for j in range(n):
                out[0, j, i] = sqT[i, j] * sqT[i, j]
        for i in range(n):
            amp[:, :] = 0.0
            amp[i, :] = sqT[i, :]
            for t in range(1, tmax + 1):
                _uq_nb(amp, sqT, sign, buf)
                _uq_nb(buf, sqT, sign, amp)
                p[:] = 0.0
                for r in range(n):
                    for j in range(n):
                        p[j] += amp[r, j] * amp[r, j]
                for j in range(n):
                    out[t, j, i] = p[j]
        return out


    @numba.njit(cache=True, fastmath=True)
    def _wq_split_nb(amp, lo, ptr, idx, val, sign, col):
        n = amp.shape[0]
        for k in range(n):
            col[k] = 0.0
        # register 1: reflection and oracle row by row, collecting column sums
        for i in range(n):
            acc = amp[i, 0] * 0.0
            for k in range(n):
                acc += amp[i, k]
            d = lo[i] * acc
            for p in range(ptr[i], ptr[i + 1]):
                d += val[p] * amp[i, idx[p]]
            a = 2.0 * d * lo[i]
            sg = sign[i]
            for k in range(n):
                v = sg * (a - amp[i, k])
                amp[i, k] = v
                col[k] += v
            b = sg * 2.0 * d
            for p in range(ptr[i], ptr[i + 1]):
                k = idx[p]
                amp[i, k] += b * val[p]
                col[k] += b * val[p]
        # register 2: the overlap for column k uses row k of the split
        c = np.empty_like(col)
        for k in range(n):
            ck = lo[k] * col[k]
            for p in range(ptr[k], ptr[k + 1]):
                ck += val[p] * amp[idx[p], k]
            c[k] = ck
            col[k] = sign[k] * 2.0 * ck * lo[k]
        for i in range(n):
            for k in range(n):
                amp[i, k] = col[k] - sign[k] * amp[i, k]
        for k in range(n):
            b = sign[k] * 2.0 * c[k]
            for p in range(ptr[k], ptr[k + 1]):
                amp[idx[p], k] += b * val[p]
        return amp

    @numba.njit(cache=True, fastmath=True)
    def _evolve_columns_split_nb(lo, ptr, idx, val, sign, tmax, out):
        n = lo.shape[0]
        amp = np.empty((n, n))
        col = np.empty(n, dtype=amp.dtype)
        p = np.empty(n)
        for i in range(n):
            for j in range(n):
                out[0, j, i] = lo[i] * lo[i]
            for q in range(ptr[i], ptr[i + 1]):
                v = lo[i] + val[q]
                out[0, idx[q], i] = v * v
        for i in range(n):
            amp[:, :] = 0.0
            for j in range(n):
                amp[i, j] = lo[i]
            for q in range(ptr[i], ptr[i + 1]):
                amp[i, idx[q]] += val[q]
            for t in range(1, tmax + 1):
                _wq_split_nb(amp, lo, ptr, idx, val, sign, col)
                p[:] = 0.0
                for r in range(n):
                    for j in range(n):
                        p[j] += amp[r, j] * amp[r, j]
                for j in range(n):
                    out[t, j, i] = p[j]
        return out


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

if USE_NUMBA:
    reflect = _reflect_nb
    uq_step = _uq_nb
    wq_step = _wq_nb
    marginal = _marginal_nb
    wq_step_split = _wq_split_nb

    def evolve_columns(sqT, sign, tmax):
        out = np.zeros((tmax + 1,) + sqT.shape)
        return _evolve_columns_nb(sqT, sign, tmax, out)

    def evolve_columns_split(lo, ptr, idx, val, sign, tmax):
        out = np.zeros((tmax + 1, lo.shape[0], lo.shape[0]))
        return _evolve_columns_split_nb(lo, ptr, idx, val, sign, tmax, out)

else:
    reflect = _reflect_np
    uq_step = _uq_np
    wq_step = _wq_np
    marginal = _marginal_np
    wq_step_split = _wq_split_np

    def evolve_columns(sqT, sign, tmax):
        out = np.zeros((tmax + 1,) + sqT.shape)
        return _evolve_columns_np(sqT, sign, tmax, out)

    def evolve_columns_split(lo, ptr, idx, val, sign, tmax):
        out = np.zeros((tmax + 1, lo.shape[0], lo.shape[0]))
        return _evolve_columns_split_np(lo, ptr, idx, val, sign, tmax, out)
