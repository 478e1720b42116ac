"""Time the coordinate-descent kernel on both backends.

Builds one random-channel instance per problem size, runs the compiled and
the pure-numpy kernels on identical inputs, and reports best-of wall times.
The first compiled call is discarded as JIT warm-up.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from irsofdm import ModelParams, codebook, reflection_table
from irsofdm.channel import subcarrier_frequencies
from irsofdm.kernels import available_backends, coordinate_descent_sweeps

SIZES = (
    ("desk", 32, 16),
    ("full", 128, 64),
)


def build_instance(n_elements, n_subcarriers, seed):
    rng = np.random.default_rng(seed)
    scale = 1e-6
    v = scale * (rng.standard_normal((n_elements, n_subcarriers, 2)) @ np.array([1.0, 1j]))
    h_d = scale * (rng.standard_normal((n_subcarriers, 2)) @ np.array([1.0, 1j]))
    freqs = subcarrier_frequencies(2.4e9, 100e6, n_subcarriers)
    table = reflection_table(ModelParams(), codebook(3), freqs)
    p = np.full(n_subcarriers, 1.0 / n_subcarriers)
    init = rng.integers(0, table.shape[0], n_elements)
    return v, h_d, table, p, scale ** 2, init


def best_time(backend, instance, repeats):
    v, h_d, table, p, sigma2, init = instance
    run = lambda: coordinate_descent_sweeps(v, h_d, table, p, sigma2, init,
                                            max_sweeps=20, backend=backend)
    run()  # warm-up; compiles on the numba path
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = run()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    backends = available_backends()
    print("backends:", ", ".join(backends))
    print("%-6s %5s %5s | %12s | %10s" % ("size", "N", "K", "backend", "best"))
    for label, n, k in SIZES:
        instance = build_instance(n, k, seed=7)
        times = {}
        for backend in backends:
            t, result = best_time(backend, instance, args.repeats)
            times[backend] = t
            print("%-6s %5d %5d | %12s | %8.3f ms  (%d sweeps, converged=%s)"
                  % (label, n, k, backend, 1e3 * t, result.sweep_rates.size,
                     result.converged))
        if len(times) == 2:
            print("%-6s %5s %5s | %12s | %8.2f x" %
                  (label, "", "", "speedup", times["numpy"] / times["numba"]))


if __name__ == "__main__":
    main()
