"""Forward/backward bootstrap operators on sequences of group elements."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cyclic_group import Element, GroupSpec, power
from .errors import ContractViolation, ZeroExponent
from .nu_array import nu_lucas


@dataclass(frozen=True)
class ElementSeq:
    """A finite sequence ``x_1 .. x_n`` of element indices (stored 0-based)."""

    group: GroupSpec
    items: tuple

    def __post_init__(self):
        p = self.group.p
        if any(not 0 <= i < p for i in self.items):
            raise ValueError(f"element indices must lie in [0, {p})")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def values(self) -> list:
        return [self.group.values[i] for i in self.items]


def seq(group: GroupSpec, items: Iterable[int]) -> ElementSeq:
    return ElementSeq(group, tuple(int(i) for i in items))


def forward(x: ElementSeq) -> ElementSeq:
    p = x.group.p
    out, acc = [], 0
    for a in x.items:
        acc = (acc + a) % p
        out.append(acc)
    return ElementSeq(x.group, tuple(out))


def backward(y: ElementSeq) -> ElementSeq:
    p = y.group.p
    out, prev = [], 0
    for b in y.items:
        # prev^(p-1) is the inverse of prev
        out.append((power(prev, p - 1, y.group) + b) % p)
        prev = b
    return ElementSeq(y.group, tuple(out))


def iterate(x: ElementSeq, K: int) -> ElementSeq:
    step = forward if K >= 0 else backward
    for _ in range(abs(K)):
        x = step(x)
    return x


def direct(x: ElementSeq, K: int) -> ElementSeq:
    """K-fold bootstrap evaluated from the exponent array rather than by iteration."""
    if K < 1:
        raise ValueError("direct requires K >= 1")
    p = x.group.p
    n = len(x)
    nu = [nu_lucas(K, l, p) for l in range(1, n + 1)]
    out = []
    for m in range(1, n + 1):
        acc = 0
        for l in range(1, m + 1):
            acc += x.items[m - l] * nu[l - 1]
        out.append(acc % p)
    return ElementSeq(x.group, tuple(out))


def power_sequence(x: ElementSeq, m: Sequence[int]) -> ElementSeq:
    p = x.group.p
    if len(m) != len(x):
        raise ValueError("exponent list must match sequence length")
    if any(e % p == 0 for e in m):
        raise ZeroExponent(f"exponents must be nonzero mod {p}")
    out, acc = [], 0
    for a, e in zip(x.items, m):
        acc = (acc + power(a, e, x.group)) % p
        out.append(acc)
    return ElementSeq(x.group, tuple(out))


@dataclass(frozen=True)
class IncrementTriangle:
    """Rows ``eta[K] = forward^K(xi)`` for ``K = 0..k_max``; row 0 is xi itself."""

    group: GroupSpec
    k_max: int
    n: int
    rows: np.ndarray  # (k_max + 1, n) element indices

    def row(self, K: int) -> ElementSeq:
        return seq(self.group, self.rows[K])


def increment_triangle(xi: ElementSeq, k_max: int) -> IncrementTriangle:
    rows = forward_many(np.asarray(xi.items, dtype=np.int64)[None, :], xi.group.p, k_max)[0]
    rows.setflags(write=False)
    return IncrementTriangle(xi.group, k_max, len(xi), rows)


def forward_many(draws: np.ndarray, p: int, k_max: int) -> np.ndarray:
    """Vectorised triangles for a batch: ``(R, n)`` indices -> ``(R, k_max + 1, n)``."""
    draws = np.asarray(draws, dtype=np.int64)
    out = np.empty((draws.shape[0], k_max + 1, draws.shape[1]), dtype=np.int64)
    out[:, 0] = draws
    for K in range(1, k_max + 1):
        out[:, K] = np.cumsum(out[:, K - 1], axis=1) % p
    return out


def solve_boundary(
    x_prefix: ElementSeq,
    x_last: Element,
    y_targets: Sequence[Element],
    K: int,
    spec: GroupSpec,
) -> ElementSeq:
    """Recover the hidden block ``x_n .. x_{n+K-1}``.

    Given ``x_1 .. x_{n-1}`` (``x_prefix``), ``x_{n+K}`` (``x_last``) and the
    values of the k-fold bootstrap at position ``n + K`` for ``k = 1..K``
    (``y_targets``), there is exactly one block making the full sequence
    consistent.  The array ``y[k][l]`` (levels ``0..K``, positions
    ``0..n+K`` with column 0 all units) obeys ``y[k+1][l] = y[k+1][l-1] (+)
    y[k][l]``, so any two cells of such a triple fix the third.  Fill order:

    1. columns ``1..n-1`` from the known prefix, column by column;
    2. the triangle hanging off the last column, one anti-diagonal at a
       time: column ``n+K-j`` is known for levels ``j..K``;
    3. the remaining cells, columns ``n..n+K-1`` left to right, each one
       bottom-up from level ``K`` to level 0.  Level 0 of those columns is
       the answer.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if len(y_targets) != K:
        raise ValueError("need exactly K targets")
    p = spec.p
    n = len(x_prefix) + 1
    L = n + K
    y = [[None] * (L + 1) for _ in range(K + 1)]
    for k in range(K + 1):
        y[k][0] = 0
    for l in range(1, n):
        y[0][l] = x_prefix[l - 1] % p
        for k in range(1, K + 1):
            y[k][l] = (y[k][l - 1] + y[k - 1][l]) % p
    y[0][L] = x_last % p
    for k in range(1, K + 1):
        y[k][L] = y_targets[k - 1] % p
    for j in range(1, K + 1):
        l = L - j
        for k in range(j, K + 1):
            # y[k][l+1] = y[k][l] (+) y[k-1][l+1]
            y[k][l] = (y[k][l + 1] - y[k - 1][l + 1]) % p
    for l in range(n, L):
        for k in range(K - 1, -1, -1):
            if y[k][l] is None:
                # y[k+1][l] = y[k+1][l-1] (+) y[k][l]
                y[k][l] = (y[k + 1][l] - y[k + 1][l - 1]) % p
    block = seq(spec, (y[0][l] for l in range(n, L)))

    full = seq(spec, list(x_prefix.items) + list(block.items) + [x_last % p])
    level = full
    for k in range(1, K + 1):
        level = forward(level)
        if level[L - 1] != y_targets[k - 1] % p:
            raise ContractViolation("boundary solution failed re-verification")
    return block
