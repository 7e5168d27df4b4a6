"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each case runs on both backends, checks that the outputs are identical, and
prints the best wall time of each and the speed-up.
"""
import argparse
import time

import numpy as np

from bootwalk import _backend
from bootwalk.cyclic_group import make_group, simple_group
from bootwalk.ensemble import simulate_checkpoints, simulate_origin_visits
from bootwalk.exact_dist import enumerate_oracle

CASES = [
    ("enumerate p=2 K=2 n=20", lambda k: enumerate_oracle(simple_group(), 2, 20, kernels=k).table),
    ("enumerate p=3 K=1 n=12", lambda k: enumerate_oracle(make_group(3, [-1, 0, 1]), 1, 12, kernels=k).table),
    ("paths p=2 K=2 n=1e4 R=1e4",
     lambda k: simulate_checkpoints(simple_group(), 2, 10**4, [2500, 5000, 10**4], 10**4, 0, kernels=k)),
    ("paths p=5 K=1 n=1e3 R=2e4",
     lambda k: simulate_checkpoints(make_group(5, [0, 1, -1, 2, -2]), 1, 10**3, [10**3], 2 * 10**4, 0, kernels=k)),
    ("visits 3-level n=1e5 R=200",
     lambda k: simulate_origin_visits(simple_group(), 2, 10**5, [10**4, 10**5], 200, 0, kernels=k)),
]


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    return a == b if isinstance(a, dict) else np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    py = _backend.load("python")
    try:
        cy = _backend.load("cython")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    print(f"{'case':<30} {'cython s':>10} {'numpy s':>10} {'speed-up':>9}  equal")
    for name, case in CASES:
        tc, oc = best_time(lambda: case(cy), args.repeat)
        tp, op = best_time(lambda: case(py), args.repeat)
        print(f"{name:<30} {tc:>10.3f} {tp:>10.3f} {tp / tc:>8.1f}x  {same(oc, op)}")


if __name__ == "__main__":
    main()
