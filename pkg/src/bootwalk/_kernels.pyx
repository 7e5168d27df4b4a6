# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Same contract as ``bootwalk._pykernels``."""
import numpy as np

from libc.stdint cimport int64_t, uint64_t


cdef inline uint64_t _limit(int p) noexcept nogil:
    # 2**64 - (2**64 % p); 0 means every word is accepted
    cdef uint64_t r = (<uint64_t>0xFFFFFFFFFFFFFFFF % <uint64_t>p + 1) % <uint64_t>p
    return <uint64_t>0 - r


cdef inline int _next_draw(const uint64_t *w, int64_t W, int p, uint64_t limit,
                           int64_t t, int64_t *wi) noexcept nogil:
    """Draw number ``t`` (0-based); -1 when the words are exhausted."""
    cdef uint64_t x
    if p == 2:
        if (t >> 6) >= W:
            return -1
        wi[0] = (t >> 6) + 1
        return <int>((w[t >> 6] >> (t & 63)) & 1)
    while True:
        if wi[0] >= W:
            return -1
        x = w[wi[0]]
        wi[0] += 1
        if limit == 0 or x < limit:
            return <int>(x % <uint64_t>p)


def enumerate_histogram(int p, vals_in, int k_max, int n, int64_t start, int64_t stop,
                        strides_in, int64_t lo, int64_t[:] out):
    cdef const int64_t[:] vals = np.ascontiguousarray(vals_in, dtype=np.int64)
    cdef const int64_t[:] strides = np.ascontiguousarray(strides_in, dtype=np.int64)
    cdef int64_t[:, :] eta = np.zeros((k_max + 1, n), dtype=np.int64)
    cdef int64_t[:, :] pref = np.zeros((k_max + 1, n), dtype=np.int64)
    cdef int64_t[:] digits = np.zeros(n, dtype=np.int64)
    cdef int64_t s, q, flat, e, acc
    cdef int j, j0, K
    if start >= stop:
        return
    q = start
    for j in range(n - 1, -1, -1):
        digits[j] = q % p
        q //= p
    with nogil:
        s = start
        j0 = 0
        while True:
            for j in range(j0, n):
                eta[0, j] = digits[j]
                pref[0, j] = (pref[0, j - 1] if j > 0 else 0) + vals[digits[j]]
                for K in range(1, k_max + 1):
                    e = (eta[K, j - 1] if j > 0 else 0) + eta[K - 1, j]
                    if e >= p:
                        e -= p
                    eta[K, j] = e
                    pref[K, j] = (pref[K, j - 1] if j > 0 else 0) + vals[e]
            flat = 0
            for K in range(k_max + 1):
                flat += (pref[K, n - 1] - lo) * strides[K]
            out[flat] += 1
            s += 1
            if s >= stop:
                break
            j = n - 1
            while digits[j] == p - 1:
                digits[j] = 0
                j -= 1
            digits[j] += 1
            j0 = j


def checkpoint_paths(const uint64_t[:, ::1] words, int p, vals_in, int k_max, int64_t n,
                     checkpoints_in, double[:, :, :] out):
    cdef const double[:] vals = np.ascontiguousarray(vals_in, dtype=np.float64)
    cdef const int64_t[:] cps = np.ascontiguousarray(checkpoints_in, dtype=np.int64)
    cdef Py_ssize_t R = words.shape[0], C = cps.shape[0]
    cdef int64_t W = words.shape[1]
    consumed_arr = np.empty(R, dtype=np.int64)
    cdef int64_t[:] consumed = consumed_arr
    cdef int64_t[:] cur = np.zeros(k_max + 1, dtype=np.int64)
    cdef double[:] path = np.zeros(k_max + 1, dtype=np.float64)
    cdef uint64_t limit = _limit(p)
    cdef Py_ssize_t r, c
    cdef int64_t t, wi, e
    cdef int K, d
    with nogil:
        for r in range(R):
            for K in range(k_max + 1):
                cur[K] = 0
                path[K] = 0.0
            c = 0
            while c < C and cps[c] == 0:
                for K in range(k_max + 1):
                    out[r, c, K] = 0.0
                c += 1
            wi = 0
            consumed[r] = 0
            for t in range(n):
                d = _next_draw(&words[r, 0], W, p, limit, t, &wi)
                if d < 0:
                    consumed[r] = -1
                    break
                cur[0] = d
                path[0] += vals[d]
                for K in range(1, k_max + 1):
                    e = cur[K] + cur[K - 1]
                    if e >= p:
                        e -= p
                    cur[K] = e
                    path[K] += vals[e]
                while c < C and cps[c] == t + 1:
                    for K in range(k_max + 1):
                        out[r, c, K] = path[K]
                    c += 1
            if consumed[r] == 0:
                consumed[r] = wi
    return consumed_arr


def origin_visits(const uint64_t[:, ::1] words, int p, vals_in, int k_max, int64_t n,
                  horizons_in, int64_t[:, :] out):
    cdef const int64_t[:] vals = np.ascontiguousarray(vals_in, dtype=np.int64)
    cdef const int64_t[:] hz = np.ascontiguousarray(horizons_in, dtype=np.int64)
    cdef Py_ssize_t R = words.shape[0], H = hz.shape[0]
    cdef int64_t W = words.shape[1]
    consumed_arr = np.empty(R, dtype=np.int64)
    cdef int64_t[:] consumed = consumed_arr
    cdef int64_t[:] cur = np.zeros(k_max + 1, dtype=np.int64)
    cdef int64_t[:] path = np.zeros(k_max + 1, dtype=np.int64)
    cdef uint64_t limit = _limit(p)
    cdef Py_ssize_t r, h
    cdef int64_t t, wi, e, visits
    cdef int K, d, home
    with nogil:
        for r in range(R):
            for K in range(k_max + 1):
                cur[K] = 0
                path[K] = 0
            h = 0
            while h < H and hz[h] == 0:
                out[r, h] = 0
                h += 1
            wi = 0
            visits = 0
            consumed[r] = 0
            for t in range(n):
                d = _next_draw(&words[r, 0], W, p, limit, t, &wi)
                if d < 0:
                    consumed[r] = -1
                    break
                cur[0] = d
                path[0] += vals[d]
                home = path[0] == 0
                for K in range(1, k_max + 1):
                    e = cur[K] + cur[K - 1]
                    if e >= p:
                        e -= p
                    cur[K] = e
                    path[K] += vals[e]
                    if path[K] != 0:
                        home = 0
                visits += home
                while h < H and hz[h] == t + 1:
                    out[r, h] = visits
                    h += 1
            if consumed[r] == 0:
                consumed[r] = wi
    return consumed_arr
