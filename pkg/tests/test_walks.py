import io
import math
from fractions import Fraction

import numpy as np
import pytest

from bootwalk.cyclic_group import GroupSpec, make_group, simple_group
from bootwalk.errors import NonZeroMean
from bootwalk.nu_array import omega
from bootwalk.walks import (
    covariance_check,
    exact_cross_moments,
    expected_visits,
    fclt_diagnostics,
    return_statistics,
    simulate_path,
    step_recursion_path,
    theory_covariance,
)

from oracles import brute_paths


def test_mean_zero_enforced():
    with pytest.raises(NonZeroMean):
        simulate_path(make_group(3, [1, 2, 3]), 1, 5, 0)
    with pytest.raises(NonZeroMean):
        simulate_path(make_group(2, [0.5, -0.5 + 1e-9]), 1, 5, 0)
    simulate_path(make_group(3, [0.1, 0.2, -0.30000000000000004]), 1, 5, 0)


def test_path_invariants():
    g = make_group(5, [0, 1, -1, 2, -2])
    w = simulate_path(g, 3, 200, 7)
    assert np.all(w.paths[:, 0] == 0)
    assert set(np.unique(np.diff(w.paths, axis=1))) <= set(float(v) for v in g.values)
    for K in range(1, 4):
        assert np.array_equal(w.triangle.rows[K], np.cumsum(w.triangle.rows[K - 1]) % 5)


def test_path_n1_all_levels_equal():
    w = simulate_path(make_group(3, [-1, 0, 1]), 4, 1, 3)
    assert len(set(w.paths[:, 1])) == 1


def test_path_deterministic():
    g = simple_group()
    a, b = simulate_path(g, 2, 500, 123), simulate_path(g, 2, 500, 123)
    assert np.array_equal(a.paths, b.paths)
    assert not np.array_equal(a.paths, simulate_path(g, 2, 500, 124).paths)


def test_step_recursion_equals_products():
    g = simple_group()
    for seed in range(100):
        w = simulate_path(g, 1, 1000, seed)
        assert np.array_equal(step_recursion_path(1000, seed), w.paths.astype(np.int64))


def test_step_recursion_first_step():
    path = step_recursion_path(1, 9)
    assert path[1, 1] == path[0, 1]


@pytest.mark.parametrize("p,values", [(2, (1, -1)), (3, (-1, 0, 1)), (3, (2, -3, 1))])
def test_exact_covariance(p, values):
    g = GroupSpec(p, values)
    n_max = 10 if p == 2 else 7
    moments = exact_cross_moments(g, 3, n_max)
    for (K, J), mat in moments.items():
        for n in range(1, n_max + 1):
            for m in range(1, n + 1):
                assert mat[m, n] == theory_covariance(g, K, J, m, n)


def test_exact_moments_match_brute_force():
    g = make_group(3, [-1, 0, 1])
    n = 4
    sums = np.zeros((2, 2), dtype=object)
    for _, _, paths in brute_paths(3, g.values, 1, n):
        for K in range(2):
            for J in range(2):
                sums[K, J] += paths[K][2] * paths[J][n]
    moments = exact_cross_moments(g, 1, n)
    for K in range(2):
        for J in range(2):
            assert moments[K, J][2, n] == Fraction(sums[K, J], 3**n)


@pytest.mark.parametrize("p,values,n", [(2, (1, -1), 8), (3, (-1, 0, 1), 6)])
def test_increment_orthogonality(p, values, n):
    g = GroupSpec(p, values)
    s2 = g.exact_values()
    s2 = sum(v * v for v in s2) / p
    sums = {}
    count = 0
    for _, rows, _ in brute_paths(p, values, 2, n):
        count += 1
        for K in range(3):
            for J in range(3):
                for a in range(n):
                    for b in range(n):
                        key = (K, J, a, b)
                        sums[key] = sums.get(key, 0) + values[rows[K][a]] * values[rows[J][b]]
    for (K, J, a, b), tot in sums.items():
        e = Fraction(tot, count)
        if a != b:
            assert e == 0
        else:
            w = omega(abs(K - J), p).omega
            assert e == (s2 if a + 1 < w else 0)


def test_theory_examples():
    g = simple_group()
    assert theory_covariance(g, 0, 1, 5, 9) == 1
    assert theory_covariance(g, 2, 2, 4, 9) == 4
    assert theory_covariance(g, 1, 3, 6, 6) == 2


def test_covariance_monte_carlo():
    rep = covariance_check(make_group(3, [-1, 0, 1]), 2, 30, 60, replicas=20_000, seed=3)
    assert rep.passed()
    assert rep.max_abs_z() < 4


def test_covariance_exact_mode():
    assert covariance_check(simple_group(), 3, 4, 9, exact=True).passed()


def test_covariance_threads_identical():
    g = simple_group()
    a = covariance_check(g, 1, 50, 100, replicas=5000, seed=1, threads=1)
    b = covariance_check(g, 1, 50, 100, replicas=5000, seed=1, threads=3)
    assert [e.estimate for e in a.entries] == [e.estimate for e in b.entries]


def test_fclt_small():
    stats = fclt_diagnostics(simple_group(), 2, 400, 8000, seed=2)
    assert stats.passed()
    assert np.allclose(stats.cross_moments, stats.cross_moments.T)
    assert stats.max_abs_correlation() <= stats.corr_tolerance


def test_fclt_variance_scaling():
    g = make_group(3, [-1, 0, 1])
    a = fclt_diagnostics(g, 1, 200, 20_000, seed=4)
    b = fclt_diagnostics(g, 1, 800, 20_000, seed=4)
    raw_a = a.variance_ratios * a.sigma2 * 200
    raw_b = b.variance_ratios * b.sigma2 * 800
    assert np.allclose(raw_b / raw_a, 4, rtol=3 * a.variance_tolerance)


def test_fclt_samples_csv():
    buf = io.StringIO()
    fclt_diagnostics(simple_group(), 1, 100, 50, seed=0, samples=buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "replica,Y0,Y1" and len(lines) == 51


def test_return_statistics_two_steps():
    rep = return_statistics(2, 2, 40_000, seed=5)
    assert rep.expected == [0.25]
    assert abs(rep.mean_visits[0] - 0.25) <= 3 * rep.stderr[0]


def test_return_statistics_growth_2d():
    rep = return_statistics(2, 10**4, 2000, seed=6)
    growth = rep.mean_visits[-1] - rep.mean_visits[0]
    exact = expected_visits(2, 10**4) - expected_visits(2, 100)
    assert growth == pytest.approx(exact, rel=0.3)
    assert exact == pytest.approx(math.log(100) / math.pi, rel=0.05)


def test_return_statistics_plateau_3d():
    rep = return_statistics(3, 10**5, 300, seed=7, horizons=[10**4, 10**5])
    assert rep.mean_visits[1] - rep.mean_visits[0] <= 0.02 + 3 * rep.stderr[1]
    assert rep.expected[1] - rep.expected[0] <= 0.02
