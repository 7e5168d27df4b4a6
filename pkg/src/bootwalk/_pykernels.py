"""Numpy implementations of the hot loops (fallback for ``_kernels``).

Signatures and results match the compiled module exactly; output arrays are
filled in place.
"""
import numpy as np

from .rng import draws_from_words

_ROWS = 256
_SEQS = 1 << 16


def _triangle(draws, p, k_max):
    tri = np.empty((k_max + 1,) + draws.shape, dtype=np.int64)
    tri[0] = draws
    for K in range(1, k_max + 1):
        if p == 2:
            tri[K] = np.bitwise_xor.accumulate(tri[K - 1], axis=-1)
        else:
            tri[K] = np.cumsum(tri[K - 1], axis=-1) % p
    return tri


def _block_draws(words, p, n):
    rows = words.shape[0]
    draws = np.zeros((rows, n), dtype=np.int64)
    used = np.empty(rows, dtype=np.int64)
    if p == 2:
        bits = np.unpackbits(np.ascontiguousarray(words, dtype="<u8").view(np.uint8),
                             axis=1, bitorder="little")
        if bits.shape[1] < n:
            used[:] = -1
            return draws, used
        draws[:] = bits[:, :n]
        used[:] = (n + 63) // 64
        return draws, used
    for i in range(rows):
        d, u = draws_from_words(words[i], p, n)
        used[i] = u
        if u >= 0:
            draws[i] = d
    return draws, used


def enumerate_histogram(p, vals, k_max, n, start, stop, strides, lo, out):
    vals = np.asarray(vals, dtype=np.int64)
    strides = np.asarray(strides, dtype=np.int64)
    powers = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for s in range(start, stop, _SEQS):
        idx = np.arange(s, min(s + _SEQS, stop), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % p
        tri = _triangle(digits, p, k_max)
        ends = vals[tri].sum(axis=-1)  # (k_max + 1, block)
        flat = ((ends - lo) * strides[:, None]).sum(axis=0)
        out += np.bincount(flat, minlength=out.shape[0])


def checkpoint_paths(words, p, vals, k_max, n, checkpoints, out):
    vals = np.asarray(vals, dtype=np.float64)
    cps = np.asarray(checkpoints, dtype=np.int64)
    consumed = np.empty(words.shape[0], dtype=np.int64)
    for r0 in range(0, words.shape[0], _ROWS):
        r1 = min(r0 + _ROWS, words.shape[0])
        draws, used = _block_draws(words[r0:r1], p, n)
        consumed[r0:r1] = used
        tri = _triangle(draws, p, k_max)
        paths = np.zeros((k_max + 1, r1 - r0, n + 1))
        np.cumsum(vals[tri], axis=-1, out=paths[:, :, 1:])
        out[r0:r1] = paths[:, :, cps].transpose(1, 2, 0)
    return consumed


def origin_visits(words, p, vals, k_max, n, horizons, out):
    vals = np.asarray(vals, dtype=np.int64)
    hz = np.asarray(horizons, dtype=np.int64)
    consumed = np.empty(words.shape[0], dtype=np.int64)
    rows = max(1, min(_ROWS, (1 << 22) // max(n, 1)))
    for r0 in range(0, words.shape[0], rows):
        r1 = min(r0 + rows, words.shape[0])
        draws, used = _block_draws(words[r0:r1], p, n)
        consumed[r0:r1] = used
        tri = _triangle(draws, p, k_max)
        at_origin = np.ones((r1 - r0, n), dtype=bool)
        for K in range(k_max + 1):
            at_origin &= np.cumsum(vals[tri[K]], axis=-1) == 0
        counts = np.cumsum(at_origin, axis=-1)
        out[r0:r1] = np.where(hz[None, :] > 0, counts[:, np.maximum(hz, 1) - 1], 0)
    return consumed
