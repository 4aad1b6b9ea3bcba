#!/usr/bin/env python3
"""Benchmark the compiled kernel against the numpy fallback.

Both backends draw the same stream, so the outputs are identical; the only
difference is wall time. Usage:

    python3 benchmarks/bench_kernel.py [--gens 20000] [--lam 100 1000]
"""

import argparse
import time

import numpy as np

from coea_lab._kernel import _pykernel

try:
    from coea_lab._kernel import _ckernel
except ImportError:
    _ckernel = None


def bench_coea(mod, n, lam, gens, seed=7):
    bitgen = np.random.PCG64(np.random.SeedSequence(seed))
    bufs = [np.zeros(gens, dtype=np.int64) for _ in range(5)]
    t0 = time.perf_counter()
    out = mod.coea_chunk(bitgen, n, lam, 0.6 / n, n // 3, n // 3 + 1, 1, gens,
                         -1, 2.5, *bufs)
    dt = time.perf_counter() - t0
    return dt, out, bufs


def bench_ea(mod, n, lam, gens, seed=8):
    bitgen = np.random.PCG64(np.random.SeedSequence(seed))
    bufs = [np.zeros(gens, dtype=np.int64) for _ in range(3)]
    t0 = time.perf_counter()
    out = mod.ea_chunk(bitgen, n, lam, 1.0 / n, n // 2, n // 2, gens, -1, *bufs)
    dt = time.perf_counter() - t0
    return dt, out, bufs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gens", type=int, default=20_000)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--lam", type=int, nargs="+", default=[100, 1000])
    args = ap.parse_args()

    if _ckernel is None:
        print("compiled kernel not available; showing fallback only")

    print(f"{'kernel':<12}{'lam':>6}{'backend':>10}{'gens/s':>14}{'speedup':>10}")
    for bench, name in ((bench_coea, "coea_chunk"), (bench_ea, "ea_chunk")):
        for lam in args.lam:
            dt_py, out_py, buf_py = bench(_pykernel, args.n, lam, args.gens)
            rate_py = args.gens / dt_py
            print(f"{name:<12}{lam:>6}{'python':>10}{rate_py:>14,.0f}{'1.0x':>10}")
            if _ckernel is not None:
                dt_c, out_c, buf_c = bench(_ckernel, args.n, lam, args.gens)
                assert out_py == out_c and all(
                    np.array_equal(a, b) for a, b in zip(buf_py, buf_c)
                ), "backends diverged"
                rate_c = args.gens / dt_c
                print(f"{name:<12}{lam:>6}{'c':>10}{rate_c:>14,.0f}"
                      f"{dt_py / dt_c:>9.1f}x")


if __name__ == "__main__":
    main()
