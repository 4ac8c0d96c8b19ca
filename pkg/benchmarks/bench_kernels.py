"""Timing comparison of the numba and numpy grid kernels.

Run:  python3 benchmarks/bench_kernels.py [--n 801] [--repeat 7]

Times grid_argmax and deviation_best on an n-point axis under both
implementations, checks that their outputs agree exactly, and reports the
median wall time per call. The numba path gets one untimed warmup call so
compilation cost is excluded. With MORALBARGAIN_NO_NUMBA=1 (or numba
missing) only the numpy path runs.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from moralbargain import kernels


def _inputs(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n)
    b = rng.normal(size=n)
    c = rng.normal(size=n)
    axis = np.linspace(0.0, 10.0, n)
    return a, b, c, axis


def _time(fn, args, repeat: int) -> float:
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=801, help="grid points per axis")
    parser.add_argument("--repeat", type=int, default=7, help="timed calls per case")
    args = parser.parse_args()

    a, b, c, axis = _inputs(args.n)
    cases = [
        ("grid_argmax", kernels.grid_argmax_numpy, (a, b, c, axis, axis)),
        (
            "deviation_best",
            kernels.deviation_best_numpy,
            (a, 0.7, c, axis, axis, 5.0, 2.5),
        ),
    ]

    print(f"axis points: {args.n}; repeats: {args.repeat}; numba available: {kernels.HAS_NUMBA}")
    header = f"{'kernel':<16} {'numpy':>12} {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fn_np, fargs in cases:
        t_np = _time(fn_np, fargs, args.repeat)
        line = f"{name:<16} {t_np * 1e3:>10.2f}ms"
        if kernels.HAS_NUMBA:
            fn_nb = getattr(kernels, f"{name}_numba")
            ref = fn_np(*fargs)
            got = fn_nb(*fargs)  # warmup; also the agreement check
            if tuple(ref) != tuple(got):
                raise AssertionError(f"{name}: numba result {got} != numpy result {ref}")
            t_nb = _time(fn_nb, fargs, args.repeat)
            line += f" {t_nb * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x"
        else:
            line += f" {'-':>12} {'-':>9}"
        print(line)


if __name__ == "__main__":
    main()
