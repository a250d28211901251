"""Timing comparison of the numba and numpy grid-solver backends.

Run with ``python benchmarks/bench_backends.py [--sizes 128,256,512,1024]``.
The same Gram matrices are fed to both backends; numba kernels are warmed
once before timing so compilation is excluded.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sigdev import backend


def _time(fn, gram, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(gram)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="128,256,512,1024")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    solvers = [
        ("explicit", backend.explicit_grid_numpy, backend.explicit_grid_numba),
        ("implicit", backend.implicit_grid_numpy, backend.implicit_grid_numba),
    ]
    if backend.explicit_grid_numba is not None:
        warm = np.eye(4) * 0.01
        backend.explicit_grid_numba(warm)
        backend.implicit_grid_numba(warm)

    print(f"selected backend: {backend.BACKEND}")
    print(f"{'scheme':<10}{'n':>6}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>9}")
    rng = np.random.default_rng(0)
    for n in sizes:
        incs = rng.normal(size=(n, 2)) * (0.5 / n)
        gram = incs @ incs.T
        for name, f_np, f_nb in solvers:
            t_np = _time(f_np, gram, args.repeats)
            if f_nb is None:
                print(f"{name:<10}{n:>6}{t_np:>12.4f}{'-':>12}{'-':>9}")
                continue
            t_nb = _time(f_nb, gram, args.repeats)
            if not np.allclose(f_np(gram), f_nb(gram), atol=1e-12):
                raise AssertionError("backends disagree")
            print(f"{name:<10}{n:>6}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.2f}")


if __name__ == "__main__":
    main()
