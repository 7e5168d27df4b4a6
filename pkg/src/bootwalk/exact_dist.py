"""Exact laws of the bootstrap walk.

Closed forms for the 2-D joint law and the 2-D/3-D return probabilities of
the +/-1 walk, checked against brute-force enumeration of all ``p**n``
increment sequences.  Exact results are integer counts over ``p**n``; floats
appear only in the log-space paths used for large step counts.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, logsumexp

from . import _backend
from .bootstrap import forward_many
from .cyclic_group import GroupSpec, simple_group
from .errors import BudgetExceeded, ContractViolation, OddSteps, UnsupportedGroup

DEFAULT_BUDGET = 1 << 24
EXACT_STEPS_MAX = 64
MAX_CELLS = 1 << 26
LOG2 = math.log(2.0)


def binom(a: int, b: int) -> int:
    """Binomial coefficient as the polynomial a(a-1)...(a-b+1)/b!.

    Zero for ``b < 0`` and for ``0 <= a < b``; for ``a < 0`` it is the usual
    extension, so ``binom(-1, 0) == 1`` (zero balls fit into zero bins one way).
    """
    if b < 0:
        return 0
    if a >= 0:
        return math.comb(a, b) if b <= a else 0
    return (-1) ** b * math.comb(b - a - 1, b)


def _require_simple(group: GroupSpec | None) -> GroupSpec:
    group = group or simple_group()
    if group.p != 2 or tuple(group.values) != (1, -1):
        raise UnsupportedGroup("closed forms need p=2 with the unit labelled +1 and the other -1")
    return group


@dataclass
class JointPmf:
    n: int
    dims: int
    p: int
    table: dict
    denominator: int
    k_max: int | None = None

    def __post_init__(self):
        if self.k_max is None:
            self.k_max = self.dims - 1

    def count(self, point) -> int:
        return self.table.get(tuple(point), 0)

    def probability(self, point) -> Fraction:
        return Fraction(self.count(point), self.denominator)

    def total(self) -> int:
        return sum(self.table.values())

    def marginal(self, axis: int) -> dict:
        out = Counter()
        for pt, c in self.table.items():
            out[pt[axis]] += c
        return dict(out)

    def support(self):
        return sorted(pt for pt, c in self.table.items() if c)

    def rows(self):
        """``(coords..., count, probability)`` for every nonzero cell, sorted."""
        for pt in self.support():
            c = self.table[pt]
            yield (*pt, c, c / self.denominator)


# ---------------------------------------------------------------------------
# closed forms for the +/-1 walk


def _cell_2d(n: int, k: int, l: int) -> int:
    if abs(k) > n or abs(l) > n or (n + k) % 2 or (n + l) % 2:
        return 0
    if (n - k) % 4 == 0 and abs(2 * l) <= n + k:
        return binom((n + l) // 2, (n + k + 2 * l) // 4) * binom((n - l - 2) // 2, (n + k - 2 * l) // 4)
    if (n - k) % 4 == 2 and abs(2 * l + 2) <= n + k:
        return (binom((n + l) // 2, (n + k + 2 * l + 2) // 4)
                * binom((n - l - 2) // 2, (n + k - 2 * l - 2) // 4))
    return 0


def joint_pmf_2d_formula(n: int, group: GroupSpec | None = None) -> JointPmf:
    """Law of ``(X_n, Y_n)`` from the closed form."""
    _require_simple(group)
    if n < 1:
        raise ValueError("n must be >= 1")
    table = {}
    for k in range(-n, n + 1):
        for l in range(-n, n + 1):
            c = _cell_2d(n, k, l)
            if c:
                table[(k, l)] = c
    return JointPmf(n, 2, 2, table, 2**n)


@dataclass(frozen=True)
class ReturnProb:
    steps: int
    exact: Fraction | None
    log: float


def _check_steps(steps: int) -> int:
    if steps % 2:
        raise OddSteps(f"steps={steps} is odd; returns only happen at even times")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    return steps


def _count_2d(steps: int) -> int:
    n, r = divmod(steps, 4)
    if r == 0:
        return binom(2 * n - 1, n) * binom(2 * n, n)
    return binom(2 * n + 1, n + 1) * binom(2 * n, n)


def _count_3d(steps: int) -> int:
    n, r = divmod(steps, 4)
    if r == 0:
        return sum(binom(n - 1, k) * binom(n, k + 1) ** 2 * binom(n - 1, k + 1) for k in range(n - 1))
    return sum(binom(n - 1, k) * binom(n, k) ** 2 * binom(n + 1, k) for k in range(n))


class _LogFactorials:
    def __init__(self):
        self.table = gammaln(np.arange(1, 2, dtype=float))

    def __call__(self, size: int) -> np.ndarray:
        if self.table.size < size + 1:
            self.table = gammaln(np.arange(1, max(size + 1, 2 * self.table.size) + 1, dtype=float))
        return self.table


_logfact = _LogFactorials()


def _log_binom(lf, a, b):
    return lf[a] - lf[b] - lf[a - b]


def _log_2d(steps: int, lf) -> float:
    n, r = divmod(steps, 4)
    if r == 0:
        return _log_binom(lf, 2 * n - 1, n) + _log_binom(lf, 2 * n, n) - steps * LOG2
    return _log_binom(lf, 2 * n + 1, n + 1) + _log_binom(lf, 2 * n, n) - steps * LOG2


def _log_3d(steps: int, lf) -> float:
    n, r = divmod(steps, 4)
    if r == 0:
        k = np.arange(n - 1)
        terms = (_log_binom(lf, n - 1, k) + 2 * _log_binom(lf, n, k + 1)
                 + _log_binom(lf, n - 1, k + 1))
    else:
        k = np.arange(n)
        terms = _log_binom(lf, n - 1, k) + 2 * _log_binom(lf, n, k) + _log_binom(lf, n + 1, k)
    return float(logsumexp(terms)) - steps * LOG2


def return_prob_2d(steps: int) -> ReturnProb:
    """P(X_steps = Y_steps = 0)."""
    _check_steps(steps)
    lf = _logfact(steps + 2)
    exact = Fraction(_count_2d(steps), 2**steps) if steps <= EXACT_STEPS_MAX else None
    return ReturnProb(steps, exact, float(_log_2d(steps, lf)))


def _oracle_origin_3d(steps: int) -> Fraction:
    pmf = enumerate_oracle(simple_group(), 2, steps)
    return pmf.probability((0, 0, 0))


def return_prob_3d(steps: int) -> ReturnProb:
    """P(X = Y = Z = 0 at time ``steps``) for the three-level walk.

    Steps 2 and 4 fall outside the closed forms' domain and are enumerated.
    """
    _check_steps(steps)
    if steps <= 4:
        exact = _oracle_origin_3d(steps)
        return ReturnProb(steps, exact, math.log(exact) if exact else -math.inf)
    lf = _logfact(steps + 2)
    exact = Fraction(_count_3d(steps), 2**steps) if steps <= EXACT_STEPS_MAX else None
    return ReturnProb(steps, exact, _log_3d(steps, lf))


@dataclass(frozen=True)
class ReturnSeries:
    dims: int
    steps: np.ndarray
    log_prob: np.ndarray
    exact: list  # Fraction for steps <= EXACT_STEPS_MAX, else None

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_prob)


def return_series(dims: int, N: int) -> ReturnSeries:
    """Return probabilities at times ``2, 4, .., 2N``."""
    if dims not in (2, 3):
        raise ValueError("dims must be 2 or 3")
    one = return_prob_2d if dims == 2 else return_prob_3d
    log_one = _log_2d if dims == 2 else _log_3d
    steps = np.arange(2, 2 * N + 1, 2)
    lf = _logfact(2 * N + 2)
    logs = np.empty(steps.size)
    exact = []
    for i, s in enumerate(steps):
        s = int(s)
        if s <= EXACT_STEPS_MAX:
            rp = one(s)
            logs[i] = rp.log
            exact.append(rp.exact)
        else:
            logs[i] = log_one(s, lf)
            exact.append(None)
    return ReturnSeries(dims, steps, logs, exact)


def partial_sum_divergence(dims: int, N: int) -> np.ndarray:
    """Partial sums ``S_M = sum_{n <= M} P(W_2n = 0)`` for ``M = 1..N``."""
    return np.cumsum(return_series(dims, N).probabilities())


def _fit_slope(ns: np.ndarray, logs: np.ndarray) -> float:
    return float(np.polyfit(np.log(ns), logs, 1)[0])


def decay_exponent_3d(n_min: int, n_max: int) -> float:
    """Least-squares slope of log P(W_4n = 0) against log n, three levels."""
    if n_min < 2 or n_max <= n_min:
        raise ValueError("need 2 <= n_min < n_max")
    lf = _logfact(4 * n_max + 2)
    ns = np.arange(n_min, n_max + 1)
    return _fit_slope(ns, np.array([_log_3d(4 * int(n), lf) for n in ns]))


def decay_exponent_2d(n_min: int, n_max: int) -> float:
    if n_min < 1 or n_max <= n_min:
        raise ValueError("need 1 <= n_min < n_max")
    lf = _logfact(4 * n_max + 2)
    ns = np.arange(n_min, n_max + 1)
    return _fit_slope(ns, np.array([_log_2d(4 * int(n), lf) for n in ns]))


# ---------------------------------------------------------------------------
# enumeration


def _budget_check(p: int, n: int, budget: int) -> int:
    total = p**n
    if total > budget:
        raise BudgetExceeded(f"p**n = {total} sequences exceeds budget {budget}")
    return total


def enumerate_oracle(group: GroupSpec, K_max: int, n: int, budget: int = DEFAULT_BUDGET,
                     threads: int | None = None, kernels=None) -> JointPmf:
    """Exact law of ``(Y_{0,n}, .., Y_{K_max,n})`` by visiting every sequence.

    Lattice points are integers when the labels are; otherwise exact
    ``Fraction`` coordinates.
    """
    kernels = kernels or _backend.kernels
    if n < 1 or K_max < 0:
        raise ValueError("need n >= 1 and K_max >= 0")
    p = group.p
    total = _budget_check(p, n, budget)
    ints, scale = group.integer_scaling()
    lo, hi = n * min(ints), n * max(ints)
    width = hi - lo + 1
    dims = K_max + 1
    if width**dims > MAX_CELLS:
        raise BudgetExceeded(f"lattice of {width}**{dims} cells is too large to tabulate")
    strides = np.array([width ** (dims - 1 - K) for K in range(dims)], dtype=np.int64)
    vals = np.asarray(ints, dtype=np.int64)

    workers = max(1, threads or 1)
    bounds = [total * i // workers for i in range(workers + 1)]
    hists = [np.zeros(width**dims, dtype=np.int64) for _ in range(workers)]

    def work(i):
        kernels.enumerate_histogram(p, vals, K_max, n, bounds[i], bounds[i + 1], strides, lo, hists[i])

    if workers == 1:
        work(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(workers)))
    hist = np.sum(hists, axis=0)

    table = {}
    for flat in np.flatnonzero(hist):
        coords, rem = [], int(flat)
        for K in range(dims):
            q, rem = divmod(rem, int(strides[K]))
            v = q + lo
            coords.append(v if scale == 1 else Fraction(v, scale))
        table[tuple(coords)] = int(hist[flat])
    return JointPmf(n, dims, p, table, p**n, K_max)


def all_sequences(p: int, n: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Every sequence of ``n`` element indices, lexicographic (step 1 most significant)."""
    total = _budget_check(p, n, budget)
    idx = np.arange(total, dtype=np.int64)
    powers = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % p


def enumerate_paths(group: GroupSpec, k_max: int, n: int, budget: int = DEFAULT_BUDGET):
    """All paths, scaled to integers.

    Returns ``(paths, triangles, scale)``: ``paths[s, K, t] * (1/scale)`` is
    ``Y_{K,t}`` for sequence ``s`` (``t = 0..n``) and ``triangles[s, K, t-1]``
    the element index of ``eta_{K,t}``.
    """
    ints, scale = group.integer_scaling()
    seqs = all_sequences(group.p, n, budget)
    tri = forward_many(seqs, group.p, k_max)
    paths = np.zeros((seqs.shape[0], k_max + 1, n + 1), dtype=np.int64)
    np.cumsum(np.asarray(ints, dtype=np.int64)[tri], axis=-1, out=paths[:, :, 1:])
    return paths, tri, scale


def count_via_bins(n: int, k: int, l: int) -> int:
    """Number of +/-1 sequences with ``X_n = k`` and ``Y_n = l``, counted with bins.

    The ``(n - k)/2`` minus-ones close bins 1..n_k; a last open bin follows.
    A plus-one in an odd bin adds +1 to ``Y`` and in an even bin -1, and each
    closing minus-one adds -1 (odd bin) or +1 (even bin), so
    ``Y = alpha - beta - (n_k mod 2)`` with ``alpha``/``beta`` the plus-ones in
    odd/even bins.  Distributions of indistinguishable balls into bins are
    counted by stars and bars.
    """
    if n < 0 or abs(k) > n or (n - k) % 2:
        return 0
    n_minus = (n - k) // 2
    n_plus = n - n_minus
    odd_bins = n_minus // 2 + 1
    even_bins = (n_minus + 1) // 2
    shift = n_minus % 2
    if (n_plus + l + shift) % 2:
        return 0
    alpha = (n_plus + l + shift) // 2
    beta = n_plus - alpha
    if alpha < 0 or beta < 0:
        return 0
    return _multichoose(odd_bins, alpha) * _multichoose(even_bins, beta)


def _multichoose(bins: int, balls: int) -> int:
    if bins == 0:
        return 1 if balls == 0 else 0
    return math.comb(bins + balls - 1, balls)


def biased_eta_law(p_bias, n: int):
    """P(eta_n = +1) when P(xi = +1) = ``p_bias``, by weighted enumeration.

    Exact (``Fraction``); checked against 1/2 (1 + (2 p_bias - 1)^n).
    """
    if n > 24:
        raise BudgetExceeded("biased enumeration is limited to n <= 24")
    if n < 1:
        raise ValueError("n must be >= 1")
    q = Fraction(p_bias)
    if not 0 < q < 1:
        raise ValueError("p_bias must lie in (0, 1)")
    seqs = all_sequences(2, n)
    minus = seqs.sum(axis=1)
    eta_plus = minus % 2 == 0  # index 0 is +1; eta_n is the index sum mod 2
    by_plus = np.bincount(n - minus[eta_plus], minlength=n + 1)
    prob = sum(int(c) * q**j * (1 - q) ** (n - j) for j, c in enumerate(by_plus))
    expected = (1 + (2 * q - 1) ** n) / 2
    if prob != expected:
        raise ContractViolation(f"enumerated {prob} != closed form {expected}")
    return prob


def markov_checks(n: int) -> list[str]:
    """Markov property of ``W_t = (X_t, Y_t)`` and homogeneity of ``W_4t``.

    (a) the law of ``W_{m+1}`` given the whole path up to ``m`` depends on
    the path only through ``W_m``; (b) the 4-step kernel from times 0, 4, 8,
    ... agrees on every state reachable at both times.  Returns the list of
    violations (empty when both hold).
    """
    if n > 12:
        raise BudgetExceeded("markov_checks enumerates 2**n paths; n must be <= 12")
    if n < 1:
        return []
    paths, _, _ = enumerate_paths(simple_group(), 1, n)
    W = [list(map(tuple, paths[:, :, t].tolist())) for t in range(n + 1)]
    total = paths.shape[0]
    violations = []

    for m in range(n):
        block = 2 ** (n - m)  # sequences sharing the first m steps are contiguous
        laws = {}
        for b0 in range(0, total, block):
            law = Counter(W[m + 1][b0:b0 + block])
            state = W[m][b0]
            seen = laws.setdefault(state, law)
            if seen != law:
                violations.append(f"time {m}: law of W_{m + 1} from state {state} depends on the path")

    kernels = {}
    for t in range(0, n - 3, 4):
        trans = defaultdict(Counter)
        for s in range(total):
            trans[W[t][s]][W[t + 4][s]] += 1
        kernels[t] = {w: {v: Fraction(c, sum(cnt.values())) for v, c in cnt.items()}
                      for w, cnt in trans.items()}
    for t1, t2 in itertools.combinations(sorted(kernels), 2):
        for w in kernels[t1].keys() & kernels[t2].keys():
            if kernels[t1][w] != kernels[t2][w]:
                violations.append(f"4-step kernel from state {w} differs between times {t1} and {t2}")
    return violations
