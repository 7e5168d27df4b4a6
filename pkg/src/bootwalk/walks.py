"""Seeded simulation of the (K+1)-level bootstrap walk and its diagnostics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

import numpy as np

from .bootstrap import IncrementTriangle, forward_many
from .cyclic_group import GroupSpec, sigma2, sigma2_exact, simple_group
from .ensemble import simulate_checkpoints, simulate_origin_visits
from .errors import NonZeroMean
from .exact_dist import DEFAULT_BUDGET, enumerate_paths, return_series
from .nu_array import omega
from .rng import replica_draws

TIME_GRID = (0.25, 0.5, 0.75, 1.0)
DEFAULT_HORIZONS = (10**2, 10**3, 10**4, 10**5)


def check_mean_zero(group: GroupSpec) -> None:
    if group.is_rational():
        total = sum(group.exact_values())
        if total != 0:
            raise NonZeroMean(f"labels sum to {total}, not 0")
    elif abs(math.fsum(float(v) for v in group.values)) > 1e-12:
        raise NonZeroMean("labels must sum to 0 (within 1e-12)")


@dataclass(frozen=True)
class WalkPath:
    group: GroupSpec
    k_max: int
    n: int
    triangle: IncrementTriangle
    paths: np.ndarray  # (k_max + 1, n + 1); paths[K, m] = Y_{K,m}

    @property
    def xi(self) -> np.ndarray:
        return self.triangle.rows[0]


def simulate_path(group: GroupSpec, k_max: int, n: int, seed: int) -> WalkPath:
    """One walk, identical to replica 0 of any ensemble run with the same seed."""
    check_mean_zero(group)
    if k_max < 0 or n < 1:
        raise ValueError("need k_max >= 0 and n >= 1")
    draws = replica_draws(seed, 0, n, group.p)
    rows = forward_many(draws[None, :], group.p, k_max)[0]
    rows.setflags(write=False)
    vals = np.asarray([float(v) for v in group.values])
    paths = np.zeros((k_max + 1, n + 1))
    np.cumsum(vals[rows], axis=1, out=paths[:, 1:])
    return WalkPath(group, k_max, n, IncrementTriangle(group, k_max, n, rows), paths)


def step_recursion_path(n: int, seed: int) -> np.ndarray:
    """``(X, Y)`` for the +/-1 walk, built only from the one-step recursion.

    ``Y_{t+1} = Y_t + (-1)^((t - X_t)/2) xi_{t+1}``; no products are formed.
    Returns an int array of shape ``(2, n + 1)``.
    """
    draws = replica_draws(seed, 0, n, 2)
    xi = 1 - 2 * draws  # index 0 is +1
    out = np.zeros((2, n + 1), dtype=np.int64)
    X = Y = 0
    for t in range(n):
        sign = -1 if ((t - X) // 2) % 2 else 1
        X += int(xi[t])
        Y += sign * int(xi[t])
        out[0, t + 1], out[1, t + 1] = X, Y
    return out


# ---------------------------------------------------------------------------
# covariance


def theory_covariance(group: GroupSpec, K: int, J: int, m: int, n: int) -> Fraction:
    """E[Y_{K,m} Y_{J,n}] for m <= n: min(m, omega_|K-J| - 1) * sigma^2."""
    if m > n:
        m, n = n, m
    w = omega(abs(K - J), group.p).omega
    return min(m, w - 1) * sigma2_exact(group)


@dataclass
class CovarianceEntry:
    K: int
    J: int
    estimate: float
    theory: float
    stderr: float
    z: float


@dataclass
class CovarianceReport:
    p: int
    k_max: int
    m: int
    n: int
    replicas: int
    exact: bool
    entries: list = field(default_factory=list)

    def max_abs_z(self) -> float:
        return max((abs(e.z) for e in self.entries), default=0.0)

    def passed(self, z_tol: float = 4.0) -> bool:
        if self.exact:
            return all(e.estimate == e.theory for e in self.entries)
        return self.max_abs_z() <= z_tol


def exact_cross_moments(group: GroupSpec, k_max: int, n: int, budget: int = DEFAULT_BUDGET):
    """Exact E[Y_{K,s} Y_{J,t}] for all K, J <= k_max and s, t <= n, by enumeration.

    Returns a dict keyed by ``(K, J)`` of ``(n+1, n+1)`` object arrays of
    ``Fraction``.
    """
    paths, _, scale = enumerate_paths(group, k_max, n, budget)
    denom = paths.shape[0] * scale * scale
    out = {}
    for K in range(k_max + 1):
        for J in range(k_max + 1):
            sums = paths[:, K, :].T @ paths[:, J, :]
            out[K, J] = np.array([[Fraction(int(v), denom) for v in row] for row in sums], dtype=object)
    return out


def covariance_check(group: GroupSpec, k_max: int, m: int, n: int, replicas: int = 10**5,
                     seed: int = 0, exact: bool = False, threads: int | None = None) -> CovarianceReport:
    check_mean_zero(group)
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    report = CovarianceReport(group.p, k_max, m, n, replicas, exact)
    if exact:
        moments = exact_cross_moments(group, k_max, n)
        for (K, J), mat in moments.items():
            th = theory_covariance(group, K, J, m, n)
            report.entries.append(CovarianceEntry(K, J, mat[m, n], th, 0.0, 0.0 if mat[m, n] == th else math.inf))
        return report
    data = simulate_checkpoints(group, k_max, n, [m, n], replicas, seed, threads)
    for K in range(k_max + 1):
        for J in range(k_max + 1):
            prod = data[:, 0, K] * data[:, 1, J]
            est = float(prod.mean())
            se = float(prod.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else math.inf
            th = float(theory_covariance(group, K, J, m, n))
            z = (est - th) / se if se > 0 else (0.0 if est == th else math.inf)
            report.entries.append(CovarianceEntry(K, J, est, th, se, z))
    return report


# ---------------------------------------------------------------------------
# functional CLT diagnostics


@dataclass
class EnsembleStats:
    replicas: int
    n: int
    k_max: int
    sigma2: float
    cross_moments: np.ndarray
    terminal_correlations: np.ndarray
    variance_ratios: np.ndarray
    fourth_moment_ratios: np.ndarray
    time_grid: tuple
    time_variance_ratios: np.ndarray  # (len(time_grid), k_max + 1)
    origin_visits: dict | None = None

    @property
    def corr_tolerance(self) -> float:
        return 4.0 / math.sqrt(self.replicas)

    @property
    def variance_tolerance(self) -> float:
        return 4.0 * math.sqrt(2.0 / self.replicas)

    fourth_moment_tolerance = 0.10

    def max_abs_correlation(self) -> float:
        c = self.terminal_correlations
        off = c[~np.eye(c.shape[0], dtype=bool)]
        return float(np.max(np.abs(off))) if off.size else 0.0

    def summary(self) -> list[tuple]:
        """``(statistic, value, tolerance, pass)`` rows."""
        rows = []
        d = self.k_max + 1
        for K in range(d):
            for J in range(K + 1, d):
                v = float(self.terminal_correlations[K, J])
                rows.append((f"corr[{K},{J}]", v, self.corr_tolerance, abs(v) <= self.corr_tolerance))
        for K in range(d):
            v = float(self.variance_ratios[K])
            rows.append((f"var_ratio[{K}]", v, self.variance_tolerance, abs(v - 1) <= self.variance_tolerance))
        for K in range(d):
            v = float(self.fourth_moment_ratios[K])
            rows.append((f"m4_ratio[{K}]", v, self.fourth_moment_tolerance,
                         abs(v - 1) <= self.fourth_moment_tolerance))
        for i, t in enumerate(self.time_grid):
            for K in range(d):
                v = float(self.time_variance_ratios[i, K])
                rows.append((f"var_ratio_t{t:g}[{K}]", v, self.variance_tolerance,
                             abs(v - 1) <= self.variance_tolerance))
        return rows

    def passed(self) -> bool:
        return all(r[3] for r in self.summary())


def write_samples(fh: TextIO, terminal: np.ndarray) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["replica"] + [f"Y{K}" for K in range(terminal.shape[1])])
    for r, row in enumerate(terminal):
        w.writerow([r] + [repr(float(v)) for v in row])


def fclt_diagnostics(group: GroupSpec, k_max: int, n: int, replicas: int, seed: int = 0,
                     threads: int | None = None, samples: TextIO | None = None) -> EnsembleStats:
    """Moment diagnostics of the normalised walk ``Y_{K, floor(nt)} / (sigma sqrt(n))``.

    Intended for ``n >= 100`` and ``replicas >= 1000``; smaller runs work
    but the tolerances are asymptotic.
    """
    check_mean_zero(group)
    s2 = sigma2(group)
    times = [int(math.floor(n * t)) for t in TIME_GRID]
    data = simulate_checkpoints(group, k_max, n, times, replicas, seed, threads)
    terminal = data[:, -1, :]
    if samples is not None:
        write_samples(samples, terminal)
    cross = terminal.T @ terminal / replicas
    corr = np.corrcoef(terminal, rowvar=False) if k_max else np.ones((1, 1))
    var_ratio = terminal.var(axis=0) / (s2 * n)
    m4_ratio = (terminal**4).mean(axis=0) / (3 * s2**2 * n**2)
    tvr = np.array([data[:, i, :].var(axis=0) / (s2 * max(t, 1)) for i, t in enumerate(times)])
    return EnsembleStats(replicas, n, k_max, s2, cross, np.atleast_2d(corr), var_ratio, m4_ratio,
                         TIME_GRID, tvr)


# ---------------------------------------------------------------------------
# origin visits


@dataclass
class VisitReport:
    dims: int
    n_steps: int
    replicas: int
    horizons: list
    mean_visits: list
    stderr: list
    expected: list  # sum of exact return probabilities up to each horizon


def expected_visits(dims: int, horizon: int) -> float:
    if horizon < 2:
        return 0.0
    return float(return_series(dims, horizon // 2).probabilities().sum())


def return_statistics(dims: int, n_steps: int, replicas: int, seed: int = 0,
                      threads: int | None = None, horizons=None) -> VisitReport:
    """Mean number of visits to the origin during steps ``1..h`` for each horizon ``h``."""
    if dims not in (2, 3):
        raise ValueError("dims must be 2 or 3")
    if horizons is None:
        horizons = [h for h in DEFAULT_HORIZONS if h < n_steps] + [n_steps]
    horizons = sorted(set(int(h) for h in horizons))
    visits = simulate_origin_visits(simple_group(), dims - 1, n_steps, horizons, replicas, seed, threads)
    means = visits.mean(axis=0)
    se = visits.std(axis=0, ddof=1) / math.sqrt(replicas) if replicas > 1 else np.full(len(horizons), math.inf)
    expected = [expected_visits(dims, h) for h in horizons]
    return VisitReport(dims, n_steps, replicas, horizons, means.tolist(), se.tolist(), expected)
