"""Replica-parallel driver for the Monte Carlo kernels.

Replicas are processed in fixed-size blocks; each block writes into its own
rows of a preallocated result array, so the output is the same for any
number of worker threads.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _backend
from .cyclic_group import GroupSpec
from .rng import check_seed, replica_words, words_needed

WORD_BUDGET = 1 << 21  # words per block, ~16 MB
MAX_BLOCK = 4096


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("BOOTWALK_THREADS", "1")))
    except ValueError:
        return 1


def _drive(call, p, n, replicas, seed, threads):
    seed = check_seed(seed)
    W = words_needed(p, n)
    block = max(1, min(MAX_BLOCK, WORD_BUDGET // W))
    spans = [(s, min(s + block, replicas)) for s in range(0, replicas, block)]

    def work(span):
        s, e = span
        words = np.empty((e - s, W), dtype=np.uint64)
        for i, r in enumerate(range(s, e)):
            words[i] = replica_words(seed, r, W)
        used = call(words, s, e)
        for i in np.flatnonzero(used < 0):
            # rejection sampling ran past the slack; widen this replica only
            r, count = s + int(i), W
            while True:
                count *= 2
                if call(replica_words(seed, r, count)[None, :], r, r + 1)[0] >= 0:
                    break

    threads = threads or default_threads()
    if threads == 1 or len(spans) == 1:
        for span in spans:
            work(span)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, spans))


def simulate_checkpoints(group: GroupSpec, k_max: int, n: int, checkpoints, replicas: int,
                         seed: int, threads: int | None = None, kernels=None) -> np.ndarray:
    """Paths ``Y_{K,t}`` at each checkpoint ``t``: array ``(replicas, C, k_max + 1)``."""
    kernels = kernels or _backend.kernels
    cps = np.asarray(sorted(int(t) for t in checkpoints), dtype=np.int64)
    if cps.size and (cps[0] < 0 or cps[-1] > n):
        raise ValueError("checkpoints must lie in [0, n]")
    vals = np.asarray([float(v) for v in group.values])
    out = np.zeros((replicas, cps.size, k_max + 1))

    def call(words, s, e):
        return kernels.checkpoint_paths(words, group.p, vals, k_max, n, cps, out[s:e])

    _drive(call, group.p, n, replicas, seed, threads)
    return out


def simulate_origin_visits(group: GroupSpec, k_max: int, n: int, horizons, replicas: int,
                           seed: int, threads: int | None = None, kernels=None) -> np.ndarray:
    """Visits to the origin during steps ``1..h`` per horizon ``h``: ``(replicas, H)``."""
    kernels = kernels or _backend.kernels
    ints, _ = group.integer_scaling()
    hz = np.asarray(sorted(int(h) for h in horizons), dtype=np.int64)
    if hz.size and (hz[0] < 0 or hz[-1] > n):
        raise ValueError("horizons must lie in [0, n]")
    out = np.zeros((replicas, hz.size), dtype=np.int64)

    def call(words, s, e):
        return kernels.origin_visits(words, group.p, np.asarray(ints, dtype=np.int64),
                                     k_max, n, hz, out[s:e])

    _drive(call, group.p, n, replicas, seed, threads)
    return out
