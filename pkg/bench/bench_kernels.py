#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage:
    python bench/bench_kernels.py [--repeat N]

The same workloads run under every available backend (see
quadcert._kernels.IMPLS); numbers are best-of-N wall times.  Results must be
identical across backends — this script asserts it while timing.
"""

import argparse
import time
from math import isqrt

import numpy as np

from quadcert import _kernels


def timeit(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_surd_period(impl):
    def run():
        total = 0
        buf = np.empty(4096, dtype=np.int64)
        for D in range(2, 20_000):
            k = isqrt(D)
            if k * k == D:
                continue
            total += impl(D, k, buf)
        return total

    return run


def bench_trial_scan(impl):
    n = (1 << 61) - 1  # Mersenne prime: forces the full scan to the bound

    def run():
        return impl(n, 10 ** 7)

    return run


def bench_smallnorm_naive(impl):
    T = isqrt((499 - 1) // 4)

    def run():
        xs, ys, ns = impl(499, 1500, T, 0)
        return len(xs)

    return run


def bench_smallnorm_window(impl):
    T = isqrt((499 - 1) // 4)

    def run():
        xs, ys, ns = impl(499, 200_000, T, 3, 0)
        return len(xs)

    return run


BENCHES = [
    ("surd_period sweep D<20k", "surd_period", bench_surd_period),
    ("trial division to 1e7", "trial_square_scan", bench_trial_scan),
    ("small-norm naive scan", "smallnorm_naive", bench_smallnorm_naive),
    ("small-norm window scan", "smallnorm_window", bench_smallnorm_window),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = sorted(_kernels.IMPLS)
    print(f"backends: {', '.join(backends)} (active: {_kernels.BACKEND})")
    header = f"{'benchmark':<28}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, key, make in BENCHES:
        times = {}
        results = {}
        for b in backends:
            fn = make(_kernels.IMPLS[b][key])
            fn()  # warm-up (JIT compile)
            times[b], results[b] = timeit(fn, args.repeat)
        canon = {b: (int(v) if not isinstance(v, tuple) else tuple(map(int, v)))
                 for b, v in results.items()}
        assert len(set(map(str, canon.values()))) == 1, f"backend mismatch on {label}"
        row = f"{label:<28}" + "".join(f"{times[b] * 1e3:>10.1f}ms" for b in backends)
        if "numba" in times and "numpy" in times and times["numba"] > 0:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
