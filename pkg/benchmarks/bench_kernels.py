"""Compare the compiled kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py

Each kernel is timed over repeated calls on fixed random inputs and the
two backends' outputs are checked for agreement first, so a speed
comparison is never reported for diverging implementations.
"""

import time

import numpy as np

from alpipe import kernels
from alpipe.kernels import pure

try:
    from alpipe.kernels import _ckernels as compiled
except ImportError:
    compiled = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pairwise(rng):
    A = rng.normal(size=(2000, 32))
    B = rng.normal(size=(500, 32))
    assert np.allclose(pure.pairwise_sq_dists(A, B),
                       compiled.pairwise_sq_dists(A, B), atol=1e-8)
    return ("pairwise_sq_dists (2000x500, d=32)",
            timeit(lambda: pure.pairwise_sq_dists(A, B), 5),
            timeit(lambda: compiled.pairwise_sq_dists(A, B), 5))


def bench_update_min(rng):
    X = rng.normal(size=(200_000, 16))
    c = rng.normal(size=16)

    def run(fn):
        d = np.full(X.shape[0], np.inf)
        for _ in range(8):
            fn(d, X, c)

    a = np.full(X.shape[0], np.inf)
    b = a.copy()
    pure.update_min_sq_dists(a, X, c)
    compiled.update_min_sq_dists(b, X, c)
    assert np.allclose(a, b, atol=1e-10)
    return ("update_min_sq_dists (200k x 16, 8 centers)",
            timeit(lambda: run(pure.update_min_sq_dists), 3),
            timeit(lambda: run(compiled.update_min_sq_dists), 3))


def bench_gini(rng):
    X = np.round(rng.normal(size=(4000, 12)), 2)
    y = rng.integers(0, 4, size=4000)
    feats = np.arange(12)
    assert pure.best_gini_split(X, y, feats, 4) == \
        compiled.best_gini_split(X, y, feats, 4)
    return ("best_gini_split (4000 rows, 12 features, C=4)",
            timeit(lambda: pure.best_gini_split(X, y, feats, 4), 5),
            timeit(lambda: compiled.best_gini_split(X, y, feats, 4), 5))


def main():
    print(f"active backend: {kernels.BACKEND}")
    if compiled is None:
        print("compiled extension not built; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':48s} {'pure':>10s} {'cython':>10s} {'speedup':>8s}")
    for bench in (bench_pairwise, bench_update_min, bench_gini):
        name, t_pure, t_cy = bench(rng)
        print(f"{name:48s} {t_pure * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms "
              f"{t_pure / t_cy:7.2f}x")


if __name__ == "__main__":
    main()
