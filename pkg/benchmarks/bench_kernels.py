#!/usr/bin/env python3
"""Benchmark the compiled simulation kernels against the pure-Python fallback.

Both backends draw identical PRNG streams, so the outputs are asserted equal
while timing. Run from the repository root:

    python benchmarks/bench_kernels.py [--samples N] [--repeat R]
"""

import argparse
import time

import numpy as np

from leakmeter import _pykernels

try:
    from leakmeter import _speedups
except ImportError:
    _speedups = None


def timed(fn, *args, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench(name, args, repeat):
    py_fn = getattr(_pykernels, name)
    py_time, py_out = timed(py_fn, *args, repeat=repeat)
    row = {"kernel": name, "pure_python_s": py_time}
    if _speedups is not None:
        c_fn = getattr(_speedups, name)
        c_time, c_out = timed(c_fn, *args, repeat=repeat)
        for a, b in zip(py_out, c_out):
            assert np.array_equal(a, b), "backends diverged"
        row["compiled_s"] = c_time
        row["speedup"] = py_time / c_time
    return row


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    jobs = [
        ("dc_kernel", (3, 0.3, args.samples, 42)),
        ("dc_kernel", (5, 0.5, args.samples, 42)),
        ("crowds_kernel", (10, 2, 0.8, args.samples, 42, 10**9)),
        ("crowds_kernel", (100, 20, 0.9, args.samples, 42, 10**9)),
    ]
    if _speedups is None:
        print("compiled kernels not built; timing the pure-Python backend only")
    print(f"samples per run: {args.samples}, best of {args.repeat}")
    header = f"{'kernel':<14} {'args':<24} {'pure python':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, job_args in jobs:
        row = bench(name, job_args, args.repeat)
        shown = str(job_args[: 3 if name == "dc_kernel" else 4])
        compiled = f"{row['compiled_s']:.4f}s" if "compiled_s" in row else "-"
        speedup = f"{row['speedup']:6.1f}x" if "speedup" in row else "-"
        print(
            f"{name:<14} {shown:<24} {row['pure_python_s']:>11.4f}s "
            f"{compiled:>12} {speedup:>9}"
        )


if __name__ == "__main__":
    main()
