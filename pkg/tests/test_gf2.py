import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphcode import gf2
from graphcode.gf2 import ERASED, Outcome


def test_mat_vec_mul_by_hand():
    assert gf2.mat_vec_mul([[1, 0], [1, 1]], [1, 1]).tolist() == [0, 1]
    assert gf2.mat_vec_mul(gf2.identity(3), [1, 0, 1]).tolist() == [1, 0, 1]
    assert gf2.mat_vec_mul([[1, 1, 0], [0, 1, 1]], [1, 1]).tolist() == [1, 0, 1]


def test_mat_vec_mul_zero_vector():
    assert gf2.mat_vec_mul([[1, 1], [1, 0]], [0, 0]).tolist() == [0, 0]


def test_mat_vec_mul_dimension_mismatch():
    with pytest.raises(gf2.DimensionError):
        gf2.mat_vec_mul(gf2.identity(3), [1, 0])


def test_rank_examples():
    assert gf2.rank(gf2.identity(4)) == 4
    assert gf2.rank(np.zeros((3, 3), np.uint8)) == 0
    assert gf2.rank([[1, 1], [1, 1]]) == 1


def test_solve_examples():
    g = np.concatenate([gf2.identity(2), [[0, 1], [1, 0]]], axis=1)
    sol = gf2.solve_with_erasures(g, [ERASED, 0, ERASED, 1])
    assert sol.outcome is Outcome.UNIQUE and sol.x.tolist() == [1, 0]
    assert gf2.solve_with_erasures(gf2.identity(2), [ERASED, 1]).outcome is Outcome.AMBIGUOUS
    sol = gf2.solve_with_erasures(gf2.identity(2), [0, 1])
    assert sol.unique and sol.x.tolist() == [0, 1]


def test_solve_inconsistent():
    g = np.array([[1, 1]], np.uint8)
    assert gf2.solve_with_erasures(g, [0, 1]).outcome is Outcome.INCONSISTENT


def test_conflicting_weight_one_columns_are_inconsistent_even_if_underdetermined():
    # x0 pinned to 0 and to 1, x1 never observed
    g = np.array([[1, 1, 0], [0, 0, 0]], np.uint8)
    assert gf2.solve_with_erasures(g, [0, 1, ERASED]).outcome is Outcome.INCONSISTENT


def test_solve_dimension_mismatch():
    with pytest.raises(gf2.DimensionError):
        gf2.solve_with_erasures(gf2.identity(2), [0, 1, 0])


def _classify(solutions):
    return {0: Outcome.INCONSISTENT, 1: Outcome.UNIQUE}.get(len(solutions), Outcome.AMBIGUOUS)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 7), st.integers(1, 12), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_solve_matches_enumeration(k, m, seed, corrupt):
    rng = np.random.default_rng(seed)
    g = rng.integers(0, 2, (k, m), dtype=np.uint8)
    word = gf2.mat_vec_mul(g, rng.integers(0, 2, k, dtype=np.uint8))
    if corrupt:
        word[rng.integers(m)] ^= 1
    word[rng.random(m) < rng.random()] = ERASED
    sols = gf2.enumerate_solutions(g, word)
    got = gf2.solve_with_erasures(g, word)
    assert got.outcome is _classify(sols)
    if got.unique:
        assert got.x.tolist() == sols[0].tolist()


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2 ** 32 - 1))
def test_systematic_round_trip(k, seed):
    rng = np.random.default_rng(seed)
    g = np.concatenate([gf2.identity(k), rng.integers(0, 2, (k, k), dtype=np.uint8)], axis=1)
    x = rng.integers(0, 2, k, dtype=np.uint8)
    sol = gf2.solve_with_erasures(g, gf2.encode(g, x))
    assert sol.unique and np.array_equal(sol.x, x)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 2 ** 32 - 1))
def test_mat_vec_mul_linear(k, m, seed):
    rng = np.random.default_rng(seed)
    g = rng.integers(0, 2, (k, m), dtype=np.uint8)
    x, y = rng.integers(0, 2, (2, k), dtype=np.uint8)
    assert np.array_equal(gf2.mat_vec_mul(g, x ^ y), gf2.mat_vec_mul(g, x) ^ gf2.mat_vec_mul(g, y))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(0, 2 ** 32 - 1))
def test_rank_invariant_under_permutation(k, m, seed):
    rng = np.random.default_rng(seed)
    g = rng.integers(0, 2, (k, m), dtype=np.uint8)
    r = gf2.rank(g)
    assert r <= min(k, m)
    assert gf2.rank(g[rng.permutation(k)][:, rng.permutation(m)]) == r
    assert gf2.rank(g.T) == r


def _sparse_case(rng, k, density):
    a = (rng.random((k, k)) < density).astype(np.uint8)
    src, dst = np.nonzero(a)
    g = np.concatenate([gf2.identity(k), a], axis=1)
    return g, src, dst


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10), st.floats(0.0, 1.0), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_sparse_systematic_solver_matches_dense_and_enumeration(k, density, seed, corrupt):
    rng = np.random.default_rng(seed)
    g, src, dst = _sparse_case(rng, k, density)
    word = gf2.mat_vec_mul(g, rng.integers(0, 2, k, dtype=np.uint8))
    if corrupt:
        word[rng.integers(2 * k)] ^= 1
    word[rng.random(2 * k) < rng.random()] = ERASED
    dense = gf2.solve_with_erasures(g, word)
    sparse = gf2.solve_systematic_sparse(k, src, dst, word)
    assert dense.outcome is sparse.outcome is _classify(gf2.enumerate_solutions(g, word))
    if dense.unique:
        assert np.array_equal(dense.x, sparse.x)


def test_sparse_systematic_solver_large_agrees_with_dense():
    rng = np.random.default_rng(7)
    for _ in range(20):
        g, src, dst = _sparse_case(rng, 200, 0.03)
        word = gf2.mat_vec_mul(g, rng.integers(0, 2, 200, dtype=np.uint8))
        word[rng.random(400) < 0.3] = ERASED
        dense = gf2.solve_with_erasures(g, word)
        sparse = gf2.solve_systematic_sparse(200, src, dst, word)
        assert dense.outcome is sparse.outcome
        if dense.unique:
            assert np.array_equal(dense.x, sparse.x)


def test_sparse_parity_matches_dense_product():
    rng = np.random.default_rng(3)
    g, src, dst = _sparse_case(rng, 40, 0.2)
    x = rng.integers(0, 2, 40, dtype=np.uint8)
    assert np.array_equal(gf2.sparse_parity(40, src, dst, x), gf2.mat_vec_mul(g[:, 40:], x))
