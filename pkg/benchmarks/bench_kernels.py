"""Numba vs numpy timing for the Monte Carlo kernels.

    python benchmarks/bench_kernels.py [--samples N] [--repeat R]

Both paths are checked for identical results before timing.
"""

import argparse
import time

from hiddenmeasure import _kernels as K
from hiddenmeasure._rng import stream_key


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    key, n = stream_key(7), args.samples
    eps, c = 0.8, 0.3

    t0 = time.perf_counter()
    K.count_below_numba(key, 0, 10, eps, c)
    K.uniforms_numba(key, 0, 10)
    print(f"numba warm-up (JIT or cache load): {time.perf_counter() - t0:.3f} s")

    assert K.count_below_numba(key, 0, n, eps, c) == K.count_below_numpy(key, 0, n, eps, c)
    assert (K.uniforms_numba(key, 0, 1000) == K.uniforms_numpy(key, 0, 1000)).all()

    cases = [
        ("count_below", lambda f: (lambda: f(key, 0, n, eps, c)), K.count_below_numba, K.count_below_numpy),
        ("uniforms", lambda f: (lambda: f(key, 0, n)), K.uniforms_numba, K.uniforms_numpy),
    ]
    print(f"n = {n:,}, best of {args.repeat}")
    print(f"{'kernel':<12} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, bind, nb, npy in cases:
        t_nb = best_of(bind(nb), args.repeat)
        t_np = best_of(bind(npy), args.repeat)
        print(f"{name:<12} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
