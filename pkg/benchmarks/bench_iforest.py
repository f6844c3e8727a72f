"""Time Isolation Forest fit and scoring on the numba kernels and the numpy twins.

    python3 benchmarks/bench_iforest.py --rows 1050 100000 --dims 5 --repeats 3

Both paths run in one process by flipping the kernel dispatch flag; scores are
checked for bitwise equality before any timing is reported.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from famdad.score import _kernels, iso_fit, iso_score


def timed(fn, repeats: int) -> tuple[float, object]:
    times, out = [], None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times), out


def run(rows: int, dims: int, trees: int, psi: int, repeats: int, compiled: bool) -> tuple[float, float, np.ndarray]:
    _kernels.NUMBA_ENABLED = compiled
    X = np.random.default_rng(rows).standard_normal((rows, dims))
    fit_time, model = timed(lambda: iso_fit(X, n_trees=trees, psi=psi, seed=0), repeats)
    score_time, scores = timed(lambda: iso_score(model, X).scores, repeats)
    return fit_time, score_time, scores


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, nargs="+", default=[1050, 20_000, 100_000])
    parser.add_argument("--dims", type=int, default=5)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--psi", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    numba_available = _kernels.NUMBA_ENABLED
    if numba_available:
        run(64, args.dims, 2, 16, 1, compiled=True)  # compile or load the cache
    else:
        print("numba disabled or missing: only the numpy path is timed")

    print(f"{'rows':>8} {'path':>6} {'fit s':>9} {'score s':>9} {'speedup':>8}")
    for rows in args.rows:
        fit_np, score_np, ref = run(rows, args.dims, args.trees, args.psi, args.repeats, compiled=False)
        print(f"{rows:>8} {'numpy':>6} {fit_np:9.4f} {score_np:9.4f} {'':>8}")
        if numba_available:
            fit_nb, score_nb, scores = run(rows, args.dims, args.trees, args.psi, args.repeats, compiled=True)
            if not np.array_equal(scores, ref):
                raise SystemExit(f"score mismatch between paths at rows={rows}")
            speedup = (fit_np + score_np) / (fit_nb + score_nb)
            print(f"{rows:>8} {'numba':>6} {fit_nb:9.4f} {score_nb:9.4f} {speedup:7.1f}x")
    _kernels.NUMBA_ENABLED = numba_available


if __name__ == "__main__":
    main()
