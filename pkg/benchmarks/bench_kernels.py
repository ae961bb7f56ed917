"""Compiled vs pure-Python elimination kernels.

For each complex the relation rows of every degree are built once, then the
echelon step and a batch of normal-form reductions are timed with each
backend.  Results are checked to be identical.

    python3 benchmarks/bench_kernels.py [--cases keel_6 keel_7 ...] [--repeat 3]
"""
from __future__ import annotations

import argparse
import random
import time

from simplicial_chow import corpus, linalg
from simplicial_chow.presentation import ChowRing


def best_of(repeat: int, fn):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", nargs="+", default=["keel_6", "two_pairs_6", "keel_7", "triangle_and_pair_7"])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--vectors", type=int, default=200, help="normal forms per degree")
    args = ap.parse_args()
    if linalg._ext is None:
        raise SystemExit("compiled kernel is not built; nothing to compare")
    rng = random.Random(0)
    print(f"{'complex':22} {'deg':>3} {'rows':>7} {'cols':>6} {'echelon py':>11} {'echelon C':>10} "
          f"{'speedup':>7} {'reduce py':>10} {'reduce C':>9} {'speedup':>7}")
    total = {"python": 0.0, "compiled": 0.0}
    for name in args.cases:
        R = ChowRing(corpus.load(name))
        for d in range(1, R.dim + 1):
            rows = R.relation_rows(d)
            deg = R._degree(d)
            t_py, b_py = best_of(args.repeat, lambda: linalg.echelon(rows, "python"))
            t_c, b_c = best_of(args.repeat, lambda: linalg.echelon(rows, "compiled"))
            assert b_py == b_c, f"{name} degree {d}: backends disagree"
            ncols = len(deg.columns)
            vecs = [
                {rng.randrange(ncols): rng.randint(-9, 9) for _ in range(8)} for _ in range(args.vectors)
            ]
            red = lambda b: [linalg.reduce_vector(v, deg.basis, deg.pivot_index, b) for v in vecs]
            r_py, out_py = best_of(args.repeat, lambda: red("python"))
            r_c, out_c = best_of(args.repeat, lambda: red("compiled"))
            assert out_py == out_c, f"{name} degree {d}: normal forms disagree"
            total["python"] += t_py + r_py
            total["compiled"] += t_c + r_c
            print(f"{name:22} {d:>3} {len(rows):>7} {ncols:>6} {t_py:>10.3f}s {t_c:>9.3f}s "
                  f"{t_py / t_c:>6.1f}x {r_py:>9.3f}s {r_c:>8.3f}s {r_py / r_c:>6.1f}x")
    print(f"total: python {total['python']:.2f}s, compiled {total['compiled']:.2f}s, "
          f"speedup {total['python'] / total['compiled']:.1f}x")


if __name__ == "__main__":
    main()
