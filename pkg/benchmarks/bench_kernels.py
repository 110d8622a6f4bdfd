"""Compare the numba and pure-numpy kernel backends.

The backend is fixed at import time by SEARCHRANK_DISABLE_NUMBA, so each one
is measured in its own subprocess. Three workloads are timed:

* ``step``: one W_Q application on a graph-built Google matrix (split kernel)
* ``dense``: the same step through the generic dense kernel
* ``columns``: every psi_i evolved for a few steps (semiclassical matrices)

Usage:  python3 benchmarks/bench_kernels.py [--sizes 128,256,512] [--repeats 5]
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np


def _best(fn, repeats, inner):
    fn()  # warm-up, includes JIT compilation
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def measure(sizes, repeats):
    from searchrank import _kernels
    from searchrank.google import google_from_graph
    from searchrank.netgen import generate_scale_free
    from searchrank.szegedy import OracleSet, Walker, build_sqrt_columns

    rows = []
    for n in sizes:
        sq = build_sqrt_columns(google_from_graph(generate_scale_free(n, 1), 0.25))
        sign = OracleSet(n, (0, 1, 2)).signs()
        walker = Walker(sq, OracleSet(n, (0, 1, 2)), sq.rows / math.sqrt(n))
        amp = walker.amp.copy()
        buf = np.empty_like(amp)
        inner = max(2, int(4e6 / n**2))
        step = _best(walker.step, repeats, inner)
        dense = _best(lambda: _kernels.wq_step(amp, sq.rows, sign, buf), repeats, inner)
        sp = sq.split
        tq = 3
        cols = _best(lambda: _kernels.evolve_columns_split(sp.lo, sp.ptr, sp.idx, sp.val, sign, tq),
                     max(1, repeats // 2), 1)
        rows.append({"n": n, "step": step, "dense": dense, "columns": cols})
    return rows


def run_backend(disable, sizes, repeats):
    env = dict(os.environ, SEARCHRANK_DISABLE_NUMBA="1" if disable else "0")
    cmd = [sys.executable, __file__, "--worker", "--sizes", ",".join(map(str, sizes)), "--repeats", str(repeats)]
    out = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True).stdout
    return json.loads(out.strip().splitlines()[-1])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="128,256,512")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if args.worker:
        from searchrank import BACKEND

        print(json.dumps({"backend": BACKEND, "rows": measure(sizes, args.repeats)}))
        return

    nb = run_backend(False, sizes, args.repeats)
    np_ = run_backend(True, sizes, args.repeats)
    if nb["backend"] != "numba":
        print("numba is not installed; both runs used the numpy backend")
    print(f"{'N':>6} {'workload':>9} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for a, b in zip(nb["rows"], np_["rows"]):
        for key in ("step", "dense", "columns"):
            print(f"{a['n']:>6} {key:>9} {a[key] * 1e3:>10.3f}ms {b[key] * 1e3:>10.3f}ms {b[key] / a[key]:>7.1f}x")


if __name__ == "__main__":
    main()
