"""Time each numba kernel against its pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from bvsquares import _jit, kernels


def _best(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    limit = 2_000_000
    primes = kernels.base_primes(math.isqrt(limit) + 1)
    spf = kernels._spf_numpy(limit, primes, kernels.SEGMENT)
    small = 200_000
    ns = np.flatnonzero(spf[: limit + 1] == np.arange(limit + 1)).astype(np.int64)
    ns = ns[ns >= 2]
    logs = np.log(ns.astype(np.float64))
    moduli = np.array([q * q for q in range(26, 36)], dtype=np.int64)
    ds = np.arange(2500, 10001, dtype=np.int64)
    us = np.ones(len(ds))
    old = np.zeros(101, dtype=np.int64)
    old[51:] = 1
    a = np.ones(50, dtype=np.int64)
    num = np.arange(1, 3000, dtype=np.int64)
    den = np.full(len(num), 3001, dtype=np.int64)
    grid = np.arange(1600, dtype=np.int64)
    return {
        "spf_sieve": (lambda f: f(limit, primes, kernels.SEGMENT), "_spf"),
        "arith_tables": (lambda f: f(spf, small), "_arith_tables"),
        "residue_sums": (lambda f: f(ns, logs, moduli), "_residue_sums"),
        "divisor_scatter": (lambda f: f(ds, us, 200_000), "_divisor_scatter"),
        "convolve_step": (lambda f: f(old, 51, a, 100 * 100 + 1), "_convolve_step"),
        "arc_counts": (lambda f: f(num, den, grid, 1600, 1, 100), "_arc_counts"),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _jit.HAS_NUMBA:
        print("numba is not installed; the jit column times the plain Python kernels")
    print(f"{'kernel':<16}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, (call, prefix) in cases().items():
        jit_fn = getattr(kernels, prefix + "_jit")
        np_fn = getattr(kernels, prefix + "_numpy")
        call(jit_fn)  # compile outside the timing
        tj = _best(lambda: call(jit_fn), args.repeat)
        tn = _best(lambda: call(np_fn), args.repeat)
        print(f"{name:<16}{tj:>12.4f}{tn:>12.4f}{tn / tj:>10.1f}x")


if __name__ == "__main__":
    main()
