"""Time the numba kernels against the pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are importable side by side. The environment flag
WWERGODIC_DISABLE_NUMBA only changes which one the library dispatches to.
"""

import argparse
import timeit

import numpy as np

from wwergodic import _kernels


def cases(rng):
    x1 = rng.standard_normal(200_000) + 1j * rng.standard_normal(200_000)
    x2 = rng.standard_normal((300, 300)) + 1j * rng.standard_normal((300, 300))
    P = rng.standard_normal((12, 12, 4, 4)) + 1j * rng.standard_normal((12, 12, 4, 4))
    return {
        "neumaier_sum": (rng.standard_normal(1_000_000),),
        "autocorr_direct[1d]": (x1[:20_000], (64,)),
        "autocorr_direct[2d]": (x2[:120, :120], (8, 8)),
        "twisted_sum[1d]": (x1, np.array([0.123])),
        "twisted_sum[2d]": (x2, np.array([0.1, 0.37])),
        "shift_products": (P, 8, 8, 3, 3),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if "numba" not in _kernels.BACKENDS:
        print("numba is not installed; only the numpy path is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':24s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for label, argv in cases(rng).items():
        name = label.split("[")[0]
        times = {}
        for backend, table in _kernels.BACKENDS.items():
            fn = table[name]
            fn(*argv)  # compile / warm up
            times[backend] = min(timeit.repeat(lambda: fn(*argv), number=1, repeat=args.repeat)) * 1e3
        nb = times.get("numba", float("nan"))
        print(f"{label:24s} {times['numpy']:12.3f} {nb:12.3f} {times['numpy'] / nb:8.1f}x")


if __name__ == "__main__":
    main()
