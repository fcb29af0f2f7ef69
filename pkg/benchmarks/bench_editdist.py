"""Benchmark the compiled edit-distance kernel against the pure-Python fallback.

Usage: python benchmarks/bench_editdist.py [--pairs N] [--length L]
"""
import argparse
import random
import string
import time

from lettot import editdist
from lettot import _editdist_py


def make_pairs(n: int, length: int, seed: int = 7) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    alphabet = string.ascii_lowercase + " "
    pairs = []
    for _ in range(n):
        a = "".join(rng.choice(alphabet) for _ in range(length))
        if rng.random() < 0.5:
            # near-duplicate: a handful of point edits
            chars = list(a)
            for _ in range(rng.randint(1, 4)):
                chars[rng.randrange(length)] = rng.choice(alphabet)
            b = "".join(chars)
        else:
            b = "".join(rng.choice(alphabet) for _ in range(length))
        pairs.append((a, b))
    return pairs


def bench(fn, pairs) -> float:
    start = time.perf_counter()
    for a, b in pairs:
        fn(a, b)
    return time.perf_counter() - start


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=2000)
    ap.add_argument("--length", type=int, default=120)
    args = ap.parse_args()

    pairs = make_pairs(args.pairs, args.length)
    mismatches = sum(
        editdist.levenshtein(a, b) != _editdist_py.levenshtein(a, b) for a, b in pairs
    )
    print(f"active backend : {editdist.BACKEND}")
    print(f"workload       : {args.pairs} pairs of length {args.length}")
    print(f"agreement      : {args.pairs - mismatches}/{args.pairs}")
    if mismatches:
        raise SystemExit("kernels disagree; benchmark aborted")

    t_active = bench(editdist.levenshtein, pairs)
    t_python = bench(_editdist_py.levenshtein, pairs)
    print(f"{editdist.BACKEND:<8} kernel : {t_active:8.3f} s "
          f"({args.pairs / t_active:10.0f} pairs/s)")
    print(f"python   kernel : {t_python:8.3f} s "
          f"({args.pairs / t_python:10.0f} pairs/s)")
    if editdist.BACKEND != "python":
        print(f"speedup        : {t_python / t_active:.1f}x")


if __name__ == "__main__":
    main()
