"""Time the numba loop kernels against the vectorised numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are called explicitly, so the environment flag does not matter
here.  The first numba call (compilation or cache load) is excluded.
"""
import argparse
import math
import timeit

import numpy as np

from nanotrap import cylinder, specfun
from nanotrap.cylinder import FiberSpec


def cases():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.1, 30.0, 20000)
    coeffs = cylinder.scattering_coefficients(FiberSpec(300e-9), 937e-9, 1.1)
    r = rng.uniform(310e-9, 2e-6, 20000)
    phi = rng.uniform(-math.pi, math.pi, r.size)
    z = rng.uniform(-1e-6, 1e-6, r.size)
    return {
        "jy_table (n<=20, 20k args)": lambda nb: specfun.jy_table(20, x, use_numba=nb),
        "scatter series (20k points)": lambda nb: cylinder.series_sum(coeffs, r, phi, z, use_numba=nb),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':32s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, fn in cases().items():
        fn(True)
        t_np = min(timeit.repeat(lambda: fn(False), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: fn(True), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:32s} {t_np:11.2f} {t_nb:11.2f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
