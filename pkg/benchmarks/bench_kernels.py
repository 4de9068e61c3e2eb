"""Time the numba kernels against their pure-numpy twins.

Shapes match the reference operating point (128 antennas, 1000 pilots of
length 96, 240 payload symbols). Run directly:

    python3 benchmarks/bench_kernels.py [--repeats 50]

The numba column requires numba; without it only the numpy path runs.
"""

import argparse
import time

import numpy as np

from pdrslink._kernels import _HAVE_NUMBA, implementations
from pdrslink.rng import RngStream, cgauss

SHAPES = {
    "row_norms_sq": lambda r: (cgauss(1000, 96, 1.0, r),),
    "col_norms_sq": lambda r: (cgauss(128, 1000, 1.0, r),),
    "abs2": lambda r: (cgauss(128, 1000, 1.0, r),),
    "residual_row_norms": lambda r: (
        cgauss(1000, 4, 1.0, r),
        cgauss(1000, 4, 1.0, r),
    ),
    "qpsk_decide": lambda r: (cgauss(96, 240, 1.0, r),),
}


def bench(fn, args, repeats):
    fn(*args)  # warm up (JIT compile on the numba path)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    rng = RngStream(0, 0)
    print(f"{'kernel':<20} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, (np_impl, nb_impl) in implementations().items():
        data = SHAPES[name](rng)
        t_np = bench(np_impl, data, args.repeats)
        if _HAVE_NUMBA and nb_impl is not None:
            t_nb = bench(nb_impl, data, args.repeats)
            print(
                f"{name:<20} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us "
                f"{t_np / t_nb:>8.2f}x"
            )
        else:
            print(f"{name:<20} {t_np * 1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
