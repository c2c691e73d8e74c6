#!/usr/bin/env python3
"""Benchmark the SVM training kernel: numba JIT path vs pure-NumPy fallback.

Builds synthetic sparse tf-idf-like problems shaped like real training runs
and times one full Pegasos schedule on each path. The JIT path is warmed up
before timing so compilation is reported separately.

    python benchmarks/bench_kernels.py [--epochs 20] [--repeats 3]
"""

import argparse
import time

import numpy as np

from nordial import kernels


def make_problem(seed, n_docs, n_features, nnz_per_doc, epochs):
    rng = np.random.default_rng(seed)
    indptr = np.zeros(n_docs + 1, dtype=np.int64)
    indices_rows = []
    for i in range(n_docs):
        nnz = int(rng.integers(nnz_per_doc // 2, nnz_per_doc * 2))
        indices_rows.append(np.sort(rng.choice(n_features, size=min(nnz, n_features), replace=False)))
        indptr[i + 1] = indptr[i] + len(indices_rows[-1])
    indices = np.concatenate(indices_rows).astype(np.int64)
    data = rng.random(len(indices)) + 0.05
    y = np.where(rng.random(n_docs) < 0.5, 1.0, -1.0)
    orders = np.stack([rng.permutation(n_docs) for _ in range(epochs)]).astype(np.int64)
    return data, indices, indptr, y, orders


def time_path(fn, args, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if kernels.pegasos_jit is None:
        print("numba path unavailable (not installed or NORDIAL_NUMBA=0); "
              "benchmarking the NumPy fallback only.")

    sizes = [
        ("small  (600 docs, 20k feats)", 600, 20_000, 150),
        ("medium (2k docs, 50k feats)", 2_000, 50_000, 250),
        ("large  (5k docs, 100k feats)", 5_000, 100_000, 300),
    ]
    lam = 0.5

    print(f"{'problem':<30}{'numpy':>12}{'numba':>12}{'speedup':>10}{'max |dw|':>12}")
    for name, n_docs, n_features, nnz in sizes:
        problem = make_problem(7, n_docs, n_features, nnz, args.epochs)
        kernel_args = (*problem[:4], lam, problem[4], n_features)

        t_numpy, (w_numpy, b_numpy, _) = time_path(kernels.pegasos_numpy, kernel_args, args.repeats)

        if kernels.pegasos_jit is not None:
            t_compile = time.perf_counter()
            kernels.pegasos_jit(*kernel_args)  # warm-up / compile
            t_compile = time.perf_counter() - t_compile
            t_numba, (w_numba, b_numba, _) = time_path(kernels.pegasos_jit, kernel_args, args.repeats)
            divergence = float(np.max(np.abs(w_numba - w_numpy)))
            print(f"{name:<30}{t_numpy:>11.3f}s{t_numba:>11.3f}s"
                  f"{t_numpy / t_numba:>9.1f}x{divergence:>12.2e}")
        else:
            print(f"{name:<30}{t_numpy:>11.3f}s{'-':>12}{'-':>10}{'-':>12}")

    if kernels.pegasos_jit is not None:
        print(f"\n(first-call JIT compile took {t_compile:.2f}s on the last problem; "
              f"cached for later runs)")


if __name__ == "__main__":
    main()
