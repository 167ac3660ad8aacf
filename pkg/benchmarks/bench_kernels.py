"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs every kernel at production-like sizes on both backends and prints a
speedup table. The numpy timings are what you get with
ACLSIM_DISABLE_NUMBA=1 (or without numba installed).

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from aclsim.kernels import _numpy_impl

try:
    from aclsim.kernels import _numba_impl
except ImportError:
    _numba_impl = None


def timeit(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(rng):
    d, d_s, d_e = 1024, 16, 64
    rho = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    eigs = rng.standard_normal(d)
    vecs = rng.standard_normal((d_s, d_e, d_e)) + 1j * rng.standard_normal((d_s, d_e, d_e))
    weights = rng.random(d_e)
    q = np.arange(-8.0, 8.0, 0.01)
    probs = rng.random(d)
    probs /= probs.sum()
    series = rng.random(601)
    return [
        ("phase_evolve (d=1024)", "phase_evolve", (rho, eigs, 0.37)),
        ("partial_trace_env (16x64)", "partial_trace_env", (rho, d_s, d_e)),
        ("partial_trace_sys (16x64)", "partial_trace_sys", (rho, d_s, d_e)),
        ("branch_reduce_sys (16,64,64)", "branch_reduce_sys", (vecs, weights)),
        ("branch_reduce_env (16,64,64)", "branch_reduce_env", (vecs, weights)),
        ("hermite_functions (1600 pts, n=16)", "hermite_functions", (q, 16)),
        ("entropy_from_eigs (d=1024)", "entropy_from_eigs", (probs, 1e-12)),
        ("positive_variation (601 pts)", "positive_variation", (series,)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = make_cases(rng)

    if _numba_impl is not None:
        for _, name, call_args in cases:  # compile outside the timed region
            getattr(_numba_impl, name)(*call_args)

    width = max(len(label) for label, _, _ in cases)
    header = f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, name, call_args in cases:
        t_np = timeit(getattr(_numpy_impl, name), call_args, args.repeats)
        if _numba_impl is None:
            print(f"{label:<{width}}  {t_np * 1e3:>8.3f}ms  {'n/a':>10}  {'n/a':>8}")
            continue
        t_nb = timeit(getattr(_numba_impl, name), call_args, args.repeats)
        print(f"{label:<{width}}  {t_np * 1e3:>8.3f}ms  {t_nb * 1e3:>8.3f}ms  "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
