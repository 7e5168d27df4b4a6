"""Exponent array of the iterated bootstrap operator.

``nu(K, n)`` is the power to which ``x[n - l + 1]`` enters the K-fold
bootstrap at position n.  It equals C(n + K - 2, n - 1) mod p and is built
here two ways: by the Pascal-type recurrence and digit-wise via Lucas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cyclic_group import check_prime
from .errors import ScanCapExceeded, SingularMatrix

INFINITY = math.inf


@dataclass(frozen=True)
class NuTable:
    p: int
    k_max: int
    n_max: int
    entries: np.ndarray  # shape (k_max + 1, n_max); column j holds n = j + 1

    def __getitem__(self, key):
        K, n = key
        return int(self.entries[K, n - 1])

    def rows(self) -> list[list[int]]:
        return self.entries.tolist()


@dataclass(frozen=True)
class OmegaValue:
    K: int
    omega: float  # int for K >= 1, INFINITY for K = 0

    @property
    def is_infinite(self) -> bool:
        return self.omega == INFINITY


def build_nu_recurrence(p: int, k_max: int, n_max: int) -> NuTable:
    p = check_prime(p)
    if k_max < 0 or n_max < 1:
        raise ValueError("need k_max >= 0 and n_max >= 1")
    t = np.zeros((k_max + 1, n_max), dtype=np.int64)
    t[0, 0] = 1
    t[:, 0] = 1
    for K in range(1, k_max + 1):
        # row K is the running sum of row K-1, since nu(K, n+1) = nu(K, n) + nu(K-1, n+1)
        t[K] = np.cumsum(t[K - 1]) % p
    t.setflags(write=False)
    return NuTable(p, k_max, n_max, t)


@lru_cache(maxsize=None)
def _small_binomials(p: int) -> tuple:
    return tuple(tuple(math.comb(a, b) % p for b in range(p)) for a in range(p))


def binom_mod_p(top: int, bottom: int, p: int) -> int:
    """C(top, bottom) mod p by Lucas, zero outside 0 <= bottom <= top."""
    if bottom < 0 or bottom > top:
        return 0
    table = _small_binomials(p)
    r = 1
    while bottom:
        a, b = top % p, bottom % p
        if b > a:
            return 0
        r = r * table[a][b] % p
        top //= p
        bottom //= p
    return r


def nu_lucas(K: int, n: int, p: int) -> int:
    if K == 0 and n == 1:
        return 1
    return binom_mod_p(n + K - 2, n - 1, p)


def _scan_cap(K: int, p: int) -> int:
    power = 1
    while power < K:
        power *= p
    return 2 * power + 2


def omega(K: int, p: int) -> OmegaValue:
    """Smallest n >= 2 with nu(K, n) != 0 mod p, found by direct scan."""
    if K < 0:
        raise ValueError("K must be non-negative")
    if K == 0:
        return OmegaValue(0, INFINITY)
    cap = _scan_cap(K, p)
    for n in range(2, cap + 1):
        if nu_lucas(K, n, p):
            return OmegaValue(K, n)
    raise ScanCapExceeded(f"no nonzero nu({K}, n) for 2 <= n <= {cap}, p={p}")


def nu_matrix(K: int, p: int) -> list[list[int]]:
    return [[nu_lucas(k, l + 1, p) for l in range(1, K + 1)] for k in range(1, K + 1)]


def det_mod_p(matrix: list[list[int]], p: int) -> int:
    a = [[x % p for x in row] for row in matrix]
    size = len(a)
    det = 1
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det = det * a[col][col] % p
        inv = pow(a[col][col], p - 2, p)
        for r in range(col + 1, size):
            f = a[r][col] * inv % p
            if f:
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[col])]
    return det % p


def nu_matrix_nonsingular(K: int, p: int) -> int:
    """Determinant mod p of (nu(k, l + 1)) for 1 <= k, l <= K; must be nonzero."""
    p = check_prime(p)
    if K < 1:
        raise ValueError("K must be >= 1")
    det = det_mod_p(nu_matrix(K, p), p)
    if det == 0:
        raise SingularMatrix(f"nu matrix of order {K} is singular mod {p}")
    return det
