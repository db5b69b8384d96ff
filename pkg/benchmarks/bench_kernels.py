#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-NumPy fallback.

Runs the three hot loops (KDE grid evaluation, empirical CF grid evaluation,
Burr log-likelihood accumulation) at pipeline-realistic sizes and prints a
timing table.  Usage:

    python benchmarks/bench_kernels.py [--n 132000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from speckledist import _kernels
from speckledist._kernels import _ref


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=132_000, help="sample size")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    data = rng.rayleigh(0.7, size=args.n)
    logx = np.log(data)
    amp_grid = np.linspace(0.05, 3.0, 512)
    freq_grid = np.linspace(0.0, 20.0, 128)
    h = 0.05

    if _kernels.BACKEND != "compiled":
        print("compiled extension not available; timing the fallback only\n")

    cases = [
        ("kde_gauss (n x 512)",
         lambda: _kernels.kde_gauss(data, amp_grid, h),
         lambda: _ref.kde_gauss(data, amp_grid, h)),
        ("ecf (n x 128)",
         lambda: _kernels.ecf(data, freq_grid),
         lambda: _ref.ecf(data, freq_grid)),
        ("softplus_sum (burr nll)",
         lambda: _kernels.softplus_sum(logx, 2.0, 0.1),
         lambda: _ref.softplus_sum(logx, 2.0, 0.1)),
        ("powexp_sum (weibull/gg nll)",
         lambda: _kernels.powexp_sum(logx, 2.0, 0.1),
         lambda: _ref.powexp_sum(logx, 2.0, 0.1)),
    ]

    print(f"n = {args.n}, best of {args.repeats} runs")
    print(f"{'kernel':<28} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for name, fast, ref in cases:
        t_ref = best_of(ref, args.repeats)
        if _kernels.BACKEND == "compiled":
            t_fast = best_of(fast, args.repeats)
            print(f"{name:<28} {t_ref*1e3:>8.1f}ms {t_fast*1e3:>8.1f}ms {t_ref/t_fast:>7.1f}x")
        else:
            print(f"{name:<28} {t_ref*1e3:>8.1f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
