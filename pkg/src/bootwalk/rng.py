"""Per-replica random streams.

Replica ``r`` of master seed ``s`` reads the Philox4x64 keystream with key
``s`` starting at counter ``(0, r, 0, 0)``.  Streams are counter-based, so a
replica's draws do not depend on how replicas are split across workers.

Raw 64-bit words become uniform draws on ``{0..p-1}`` as follows (the
compiled and numpy kernels implement the same rule):

* ``p == 2``: draw ``j`` is bit ``j % 64`` (least significant first) of word
  ``j // 64``;
* otherwise one word per draw, rejecting words ``>= 2**64 - (2**64 % p)`` so
  that ``word % p`` is exactly uniform.
"""
from __future__ import annotations

import numpy as np

SEED_LIMIT = 1 << 64
REJECTION_SLACK = 16


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def replica_generator(seed: int, replica: int) -> np.random.Philox:
    return np.random.Philox(key=check_seed(seed), counter=[0, int(replica), 0, 0])


def replica_words(seed: int, replica: int, count: int) -> np.ndarray:
    return replica_generator(seed, replica).random_raw(count).astype("<u8", copy=False)


def words_needed(p: int, n: int) -> int:
    if p == 2:
        return max(1, (n + 63) // 64)
    return n + REJECTION_SLACK


def rejection_limit(p: int) -> int:
    return SEED_LIMIT - (SEED_LIMIT % p)


def draws_from_words(words: np.ndarray, p: int, n: int):
    """Map one replica's words to ``n`` draws; returns ``(draws, words_used)``.

    ``words_used`` is -1 when the words ran out before ``n`` draws.
    """
    words = np.asarray(words, dtype="<u8")
    if p == 2:
        if words.size * 64 < n:
            return None, -1
        bits = np.unpackbits(words.view(np.uint8), bitorder="little")[:n]
        return bits.astype(np.int64), (n + 63) // 64
    ok = np.flatnonzero(words < np.uint64(rejection_limit(p)))
    if ok.size < n:
        return None, -1
    used = ok[:n]
    return (words[used] % np.uint64(p)).astype(np.int64), int(used[-1]) + 1 if n else 0


def replica_draws(seed: int, replica: int, n: int, p: int) -> np.ndarray:
    count = words_needed(p, n)
    while True:
        draws, used = draws_from_words(replica_words(seed, replica, count), p, n)
        if used >= 0:
            return draws
        count *= 2
