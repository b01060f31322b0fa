"""Time the numba and numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

numba timings exclude the first (compiling) call.
"""

import argparse
import time

import numpy as np

from adagres.kernels import numba_kernels, numpy_kernels


def inputs(n, d=32, seed=0):
    rng = np.random.default_rng(seed)
    emb = rng.standard_normal((n, d))
    emb /= np.linalg.norm(emb, axis=1, keepdims=True)
    q = rng.standard_normal(d)
    q /= np.linalg.norm(q)
    S = np.maximum(emb @ emb.T, 0.0)
    np.fill_diagonal(S, 0.0)
    qs = np.ascontiguousarray(np.maximum(emb @ q, 0.0))
    lengths = rng.integers(20, 200, size=n).astype(np.int64)
    return qs, S, lengths


CASES = [
    ("greedy n=64", 64, lambda k, qs, S, L: k.greedy(qs, S, L, 1.0, 0.5, 2000)),
    ("greedy n=1024", 1024, lambda k, qs, S, L: k.greedy(qs, S, L, 1.0, 0.5, 20000)),
    ("subset_values n=16", 16, lambda k, qs, S, L: k.subset_values(qs, S, L, 1.0, 0.5, 800)),
    ("subset_values n=20", 20, lambda k, qs, S, L: k.subset_values(qs, S, L, 1.0, 0.5, 800)),
    ("gap_exhaustive n=8", 8, lambda k, qs, S, L: k.gap_exhaustive(qs, S, 1.0, 0.5)),
    ("gap_exhaustive n=10", 10, lambda k, qs, S, L: k.gap_exhaustive(qs, S, 1.0, 0.5)),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = [("numpy", numpy_kernels)]
    if numba_kernels is not None:
        backends.append(("numba", numba_kernels))
    else:
        print("numba unavailable or disabled; timing numpy only")

    print(f"{'case':<22}" + "".join(f"{name:>12}" for name, _ in backends) + ("     speedup" if len(backends) == 2 else ""))
    for label, n, call in CASES:
        qs, S, L = inputs(n)
        row = []
        for _, k in backends:
            call(k, qs, S, L)  # warm-up, and compile for numba
            row.append(best_of(lambda: call(k, qs, S, L), args.repeat))
        line = f"{label:<22}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row)
        if len(row) == 2:
            line += f"{row[0] / row[1]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
