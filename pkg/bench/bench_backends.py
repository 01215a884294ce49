#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy twins.

The hot loops are the Mittag-Leffler lattice evaluations that dominate
multiplier-table and Duhamel-weight construction.  Run:

    python bench/bench_backends.py [--sizes 1024,4096,16384] [--repeats 5]

The numpy path is always available; the numba path is skipped when numba is
not importable.  Results are wall-clock medians; the numba column includes a
separate warm-up (JIT compile) pass.
"""

import argparse
import time

import numpy as np

import fhw._ml_numpy as ml_numpy

try:
    import fhw._ml_numba as ml_numba
except ImportError:
    ml_numba = None

WORKLOADS = [
    # (label, alpha, b) -- b = 1 is the propagator symbol, b = alpha the
    # Duhamel forcing kernel
    ("propagator symbol   E_a(-x)      a=1.5", 1.5, 1.0),
    ("duhamel kernel      E_{a,a}(-x)  a=1.5", 1.5, 1.5),
    ("duhamel kernel      E_{a,a}(-x)  a=1.25", 1.25, 1.25),
]


def lattice_args(size, rng):
    """xi^2 values shaped like a 2D lattice scan across a time sweep."""
    lam = np.sort(rng.uniform(0.0, 2048.0, size))
    w = 0.35
    return (w**1.5) * lam


def run(fn, a, b, x, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(a, b, x, 5.0, 1e-16, 5e-13)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1024,4096,16384")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    print(f"{'workload':44s} {'size':>7s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for label, a, b in WORKLOADS:
        for size in sizes:
            x = lattice_args(size, rng)
            t_np = run(ml_numpy.ml_arr, a, b, x, args.repeats)
            if ml_numba is not None:
                ml_numba.ml_arr(a, b, x[:8], 5.0, 1e-16, 5e-13)  # warm-up / JIT
                t_nb = run(ml_numba.ml_arr, a, b, x, args.repeats)
                ratio = f"{t_np / t_nb:7.2f}x"
                nb_col = f"{t_nb * 1e3:8.2f}ms"
            else:
                nb_col = "     n/a"
                ratio = "     n/a"
            print(f"{label:44s} {size:7d} {t_np * 1e3:8.2f}ms {nb_col} {ratio}")

    # agreement spot check
    x = lattice_args(4096, rng)
    if ml_numba is not None:
        v1 = ml_numpy.ml_arr(1.5, 1.5, x, 5.0, 1e-16, 5e-13)
        v2 = ml_numba.ml_arr(1.5, 1.5, x, 5.0, 1e-16, 5e-13)
        rel = np.max(np.abs(v1 - v2) / np.maximum(np.abs(v2), 1e-13))
        print(f"\nbackend agreement (rel): {rel:.2e}")


if __name__ == "__main__":
    main()
