"""Independent reference computations for the tests.

Nothing here imports the package: these are slow, obvious implementations
used to check the fast ones.
"""
import itertools
import math
from collections import Counter, defaultdict
from fractions import Fraction


def prefix_mod(xs, p):
    out, acc = [], 0
    for x in xs:
        acc = (acc + x) % p
        out.append(acc)
    return out


def triangle(xs, p, k_max):
    rows = [list(xs)]
    for _ in range(k_max):
        rows.append(prefix_mod(rows[-1], p))
    return rows


def brute_terminal_law(p, values, k_max, n):
    """Counter of (Y_0,n, .., Y_K,n) over all p**n sequences, via itertools."""
    law = Counter()
    for xs in itertools.product(range(p), repeat=n):
        rows = triangle(xs, p, k_max)
        law[tuple(sum(values[i] for i in row) for row in rows)] += 1
    return law


def brute_paths(p, values, k_max, n):
    """Yield the list of (K+1) real paths (each of length n+1) per sequence."""
    for xs in itertools.product(range(p), repeat=n):
        rows = triangle(xs, p, k_max)
        paths = []
        for row in rows:
            acc, path = 0, [0]
            for i in row:
                acc += values[i]
                path.append(acc)
            paths.append(path)
        yield xs, rows, paths


def origin_counts_dp(levels, steps):
    """Number of +/-1 sequences of length ``steps`` whose ``levels`` walks all sit at 0.

    Dynamic programme over (last increment index of every level >= 1,
    current positions); index 0 is +1, index 1 is -1.
    """
    states = {((0,) * (levels - 1), (0,) * levels): 1}
    for _ in range(steps):
        nxt = defaultdict(int)
        for (last, pos), c in states.items():
            for b in (0, 1):
                inc = [b]
                for k in range(levels - 1):
                    inc.append(last[k] ^ inc[-1])
                new_pos = tuple(x + (1 - 2 * e) for x, e in zip(pos, inc))
                nxt[(tuple(inc[1:]), new_pos)] += c
        states = nxt
    return sum(c for (_, pos), c in states.items() if not any(pos))


def nu_binomial(K, n, p):
    if K == 0:
        return 1 if n == 1 else 0
    return math.comb(n + K - 2, n - 1) % p


def omega_scan(K, p):
    if K == 0:
        return math.inf
    n = 2
    while nu_binomial(K, n, p) == 0:
        n += 1
    return n


def integer_det(matrix):
    """Exact determinant by fraction-valued elimination."""
    a = [[Fraction(x) for x in row] for row in matrix]
    size, det = len(a), Fraction(1)
    for c in range(size):
        piv = next((r for r in range(c, size) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, size):
            f = a[r][c] / a[c][c]
            for j in range(c, size):
                a[r][j] -= f * a[c][j]
    return int(det)
