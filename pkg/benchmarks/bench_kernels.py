"""Compiled vs numpy kernels: displacement accumulation and trace coefficients.

Run from the repository root after an editable install::

    python benchmarks/bench_kernels.py [--radii 400] [--N 24 48 96] [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel and size, the speedup of
the compiled backend and the largest elementwise discrepancy between the two.
"""

import argparse
import timeit

import numpy as np

from gpdo import _kernels_py

try:
    from gpdo import _kernels_c
except ImportError:  # pragma: no cover
    _kernels_c = None


def cases(R, N, rng):
    rho = np.sort(rng.uniform(0.0, 6.0, R))
    C = rng.standard_normal((R, 2 * N + 1)) + 1j * rng.standard_normal((R, 2 * N + 1))
    F = rng.standard_normal((N + 1, N + 1)) + 1j * rng.standard_normal((N + 1, N + 1))
    return {
        "accumulate": lambda m: m.accumulate(rho, C, N),
        "trace_coeffs": lambda m: m.trace_coeffs(rho, F, N),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radii", type=int, default=400)
    ap.add_argument("--N", type=int, nargs="+", default=[24, 48, 96])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not importable; build with `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<14}{'N':>5}{'numpy [ms]':>13}{'cython [ms]':>13}{'speedup':>9}{'max diff':>11}")
    for N in args.N:
        for name, fn in cases(args.radii, N, rng).items():
            t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
            t_c = min(timeit.repeat(lambda: fn(_kernels_c), number=1, repeat=args.repeat))
            a, b = fn(_kernels_py), fn(_kernels_c)
            diff = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
            print(f"{name:<14}{N:>5}{1e3 * t_py:>13.2f}{1e3 * t_c:>13.2f}{t_py / t_c:>9.1f}{diff:>11.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
