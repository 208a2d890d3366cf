"""Numba vs NumPy timings for the float kernels.

Compares, on identical inputs:
- batched LU determinants (many small complex matrices)
- the Plücker minors of one frame
- the Pade(13) matrix exponential
- soliton tau evaluation over a field grid

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import time
from itertools import combinations

import numpy as np

from grasstau import _kernels

if _kernels.NUMBA is None:
    raise SystemExit("numba is not installed; nothing to compare")


def timeit(fn, repeat):
    fn()  # warm-up (covers JIT compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    stack = rng.standard_normal((20000, 4, 4)) + 1j * rng.standard_normal((20000, 4, 4))
    yield "det_batch 20000x4x4", "det_batch", (stack,)

    w = rng.standard_normal((12, 5)) + 1j * rng.standard_normal((12, 5))
    idx = np.array(list(combinations(range(12), 5)), dtype=np.int64)
    yield f"minors C(12,5)={len(idx)}", "minors", (w, idx)

    a = 0.5 * (rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)))
    yield "expm 8x8", "expm", (a,)

    n = 3
    lam = rng.uniform(0.3, 1.2, n) * np.array([1, -1, 1])
    mu = rng.uniform(-1.2, -0.3, n)
    x = rng.uniform(0.5, 2.0, (n, 1)) / (lam[None, :] - mu[:, None])
    times = np.zeros((30000, 3))
    times[:, 0] = np.linspace(-10, 10, 30000)
    times[:, 1] = 0.5
    yield "soliton_grid 30000 pts n=3", "soliton_grid", (x, lam, mu, times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'kernel':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s} {'rel diff':>10s}")
    for label, name, inputs in cases(rng):
        np_fn = getattr(_kernels.NUMPY, name)
        nb_fn = getattr(_kernels.NUMBA, name)
        ref, got = np.asarray(np_fn(*inputs)), np.asarray(nb_fn(*inputs))
        diff = np.max(np.abs(ref - got) / np.maximum(np.abs(ref), 1.0))
        t_np = timeit(lambda: np_fn(*inputs), args.repeat)
        t_nb = timeit(lambda: nb_fn(*inputs), args.repeat)
        print(f"{label:32s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} {t_np / t_nb:8.2f} {diff:10.2e}")


if __name__ == "__main__":
    main()
