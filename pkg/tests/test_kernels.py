import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bootwalk import _backend
from bootwalk.cyclic_group import make_group, simple_group
from bootwalk.ensemble import simulate_checkpoints, simulate_origin_visits
from bootwalk.exact_dist import enumerate_oracle
from bootwalk.rng import draws_from_words, rejection_limit, replica_draws, replica_words, words_needed
from bootwalk.walks import simulate_path

PY = _backend.load("python")
try:
    CY = _backend.load("cython")
except ImportError:
    CY = None

needs_cython = pytest.mark.skipif(CY is None, reason="compiled extension not built")

GROUPS = [simple_group(), make_group(3, [-1, 0, 1]), make_group(5, [0, 1, -1, 2, -2]), make_group(7, [0, 1, -1, 2, -2, 3, -3])]


def test_backend_name():
    assert _backend.NAME in ("cython", "python")


def test_rejection_limit():
    assert rejection_limit(2) == 1 << 64
    assert rejection_limit(3) % 3 == 0 and (1 << 64) - rejection_limit(3) < 3


def test_draws_uniform_and_unbiased():
    d = replica_draws(0, 0, 300_000, 3)
    counts = np.bincount(d, minlength=3)
    assert np.all(np.abs(counts - 100_000) < 5 * np.sqrt(300_000 * 2 / 9))


def test_draws_bits_p2():
    words = np.array([0b1011], dtype=np.uint64)
    draws, used = draws_from_words(words, 2, 4)
    assert draws.tolist() == [1, 1, 0, 1] and used == 1


def test_draws_run_out():
    words = replica_words(0, 0, 2)
    _, used = draws_from_words(words, 5, 10)
    assert used == -1


def test_replica_streams_independent_of_count():
    assert np.array_equal(replica_words(9, 4, 10), replica_words(9, 4, 40)[:10])
    assert words_needed(2, 130) == 3


@needs_cython
@pytest.mark.parametrize("g", GROUPS, ids=lambda g: f"p{g.p}")
def test_checkpoints_cross_backend(g):
    a = simulate_checkpoints(g, 3, 257, [0, 1, 64, 200, 257], 300, seed=11, kernels=PY)
    b = simulate_checkpoints(g, 3, 257, [0, 1, 64, 200, 257], 300, seed=11, kernels=CY)
    assert np.array_equal(a, b)


@needs_cython
@pytest.mark.parametrize("k_max", [0, 1, 2])
def test_visits_cross_backend(k_max):
    a = simulate_origin_visits(simple_group(), k_max, 2000, [10, 100, 2000], 300, seed=2, kernels=PY)
    b = simulate_origin_visits(simple_group(), k_max, 2000, [10, 100, 2000], 300, seed=2, kernels=CY)
    assert np.array_equal(a, b)


@needs_cython
@pytest.mark.parametrize("g", GROUPS[:3], ids=lambda g: f"p{g.p}")
def test_enumeration_cross_backend(g):
    n = {2: 12, 3: 7, 5: 5}[g.p]
    a = enumerate_oracle(g, 2, n, kernels=PY)
    b = enumerate_oracle(g, 2, n, kernels=CY)
    assert a.table == b.table


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(0, 3), st.integers(1, 150), st.integers(0, 2**64 - 1))
def test_checkpoints_match_single_path(g, k_max, n, seed):
    """Replica 0 of an ensemble equals the standalone path for the same seed."""
    data = simulate_checkpoints(g, k_max, n, range(n + 1), 3, seed)
    w = simulate_path(g, k_max, n, seed)
    assert np.allclose(data[0].T, w.paths, atol=1e-9)


def test_visits_count_zeros():
    g = simple_group()
    n = 60
    visits = simulate_origin_visits(g, 1, n, [n], 5, seed=4)
    for r in range(5):
        draws = replica_draws(4, r, n, 2)
        xi = 1 - 2 * draws
        eta = 1 - 2 * (np.cumsum(draws) % 2)
        zero = (np.cumsum(xi) == 0) & (np.cumsum(eta) == 0)
        assert visits[r, 0] == zero.sum()


def test_thread_invariance():
    g = make_group(5, [0, 1, -1, 2, -2])
    a = simulate_checkpoints(g, 2, 300, [150, 300], 9000, seed=8, threads=1)
    b = simulate_checkpoints(g, 2, 300, [150, 300], 9000, seed=8, threads=4)
    assert np.array_equal(a, b)
