"""Compare the compiled kernels against the pure-Python fallback.

Times the two hot paths, row reduction mod p and point-count enumeration,
on both backends and prints a small table.  Run from the repo root:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --rows 400 --cols 800 --repeats 5
"""
import argparse
import importlib
import time

import numpy as np

from rclab.oracle import compile_system
from rclab.poly import random_homogeneous


def _load_backends():
    backends = {}
    try:
        backends["compiled"] = importlib.import_module("rclab._kernels._speedups")
    except ImportError:
        pass
    backends["pure"] = importlib.import_module("rclab._kernels._fallback")
    return backends


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_rref(backends, rows, cols, prime, repeats):
    rng = np.random.default_rng(0)
    base = rng.integers(0, prime, size=(rows, cols), dtype=np.int64)
    results = {}
    for name, mod in backends.items():
        # rref works in place, so each run gets a fresh copy
        results[name] = _time(lambda m=mod: m.rref_mod(base.copy(), prime), repeats)
    return results


def bench_count(backends, q, repeats):
    rng = np.random.default_rng(0)
    F = random_homogeneous(3, 2, q, rng)
    coeffs, var_idx, offsets = compile_system(F, 1)
    n_vars = F.n_vars * 2
    total = q ** n_vars
    results = {}
    for name, mod in backends.items():
        results[name] = _time(
            lambda m=mod: m.count_vanishing(coeffs, var_idx, offsets,
                                            n_vars, q, 0, total),
            repeats)
    return results


def _report(title, results):
    print(f"\n{title}")
    baseline = results.get("pure")
    for name in ("compiled", "pure"):
        if name not in results:
            print(f"  {name:>8}: not available")
            continue
        t = results[name]
        ratio = f"  ({baseline / t:.1f}x vs pure)" if name == "compiled" else ""
        print(f"  {name:>8}: {t * 1e3:8.2f} ms{ratio}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=200)
    parser.add_argument("--cols", type=int, default=400)
    parser.add_argument("--prime", type=int, default=10007)
    parser.add_argument("--q", type=int, default=7,
                        help="field size for the enumeration benchmark")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = _load_backends()
    print(f"backends: {', '.join(backends)}")

    _report(f"rref_mod  {args.rows}x{args.cols} mod {args.prime}",
            bench_rref(backends, args.rows, args.cols, args.prime, args.repeats))
    _report(f"count_vanishing  (n=3, d=2, e=1) over F_{args.q}, "
            f"{args.q ** 8} candidates",
            bench_count(backends, args.q, args.repeats))


if __name__ == "__main__":
    main()
