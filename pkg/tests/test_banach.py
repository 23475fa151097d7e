import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padic_stochastic.banach import (
    MatrixOperator,
    ProjectionValuedMeasure,
    RankOneSum,
    UnsupportedOperator,
    adjoint,
    compose_check,
    essential_sup,
    nu_q,
    operator_norm,
    pvm_from_partition,
    spectral_decompose,
    spectral_integral,
    vector_norm,
)
from padic_stochastic.exact import Product, Sum, le
from padic_stochastic.function_spaces import padic_abs
from padic_stochastic.padic import Ball, partition

F = Fraction


def test_operator_norm_examples():
    assert operator_norm(MatrixOperator.identity(3, 5)) == 1
    assert operator_norm(MatrixOperator.diagonal([3, 9], 3)) == F(1, 3)


@pytest.mark.parametrize("p", [2, 3])
def test_operator_norm_matches_grid_sup(p):
    A = MatrixOperator.from_rows([[F(1, p), 2, 0], [p, 1, F(3, 4)], [0, p * p, 5]], p)
    # every vector with digits in 0..p-1 and one unit coordinate
    best = F(0)
    for xs in itertools.product(range(p), repeat=3):
        x = np.array(xs, dtype=object)
        if vector_norm(x, p) == 1:
            best = max(best, vector_norm(A @ x, p))
    assert best == operator_norm(A)


def test_single_rank_one_term():
    e = np.array([1, 0], dtype=object)
    R = RankOneSum(((e, e),), 3, (2, 2))
    assert nu_q(R, 2).exact() == 1


def test_nu_infinity_is_operator_norm():
    A = MatrixOperator.from_rows([[3, 1], [F(1, 3), 9]], 3)
    assert nu_q(A, math.inf).exact() == operator_norm(A)


@pytest.mark.parametrize("p, m", [(2, 4), (3, 3), (5, 2)])
def test_nu_one_of_geometric_diagonal(p, m):
    A = MatrixOperator.diagonal([p**n for n in range(m + 1)], p)
    assert nu_q(A, 1).exact() == sum(F(1, p**n) for n in range(m + 1))
    assert spectral_decompose(A).nu_q(1).exact() == nu_q(A, 1).exact()


def test_decompose_grouping_by_valuation():
    p = 3
    dec = spectral_decompose(MatrixOperator.diagonal([1, p, p], p))
    assert dec.scale.norm() == 1
    P0, P1 = dec.projectors
    assert P0.equals(MatrixOperator.diagonal([1, 0, 0], p))
    assert P1.equals(MatrixOperator.diagonal([0, 1, 1], p))


def test_decompose_equal_valuations_p5():
    A = MatrixOperator.diagonal([25, 50], 5)
    dec = spectral_decompose(A)
    assert dec.scale.norm() == F(1, 25)
    assert len(dec.projectors) == 1
    assert dec.U.equals(MatrixOperator.diagonal([1, 2], 5))
    assert dec.reconstruct().equals(A)


def test_decompose_rejects_zero_and_dense():
    with pytest.raises(UnsupportedOperator):
        spectral_decompose(MatrixOperator.diagonal([0, 0], 3))
    with pytest.raises(UnsupportedOperator):
        spectral_decompose(MatrixOperator.from_rows([[1, 1], [0, 1]], 3))


def test_decompose_permutation_matrix():
    A = MatrixOperator.from_rows([[0, 4], [6, 0]], 2)
    dec = spectral_decompose(A)
    assert dec.reconstruct().equals(A)
    assert operator_norm(dec.U) == 1


def test_composition_examples():
    one = MatrixOperator.identity(1, 3)
    lhs, (a, b) = compose_check(one, one, 2, 2)
    assert lhs.exact() == 1 and a.exact() == 1 and b.exact() == 1
    J = MatrixOperator.diagonal([3], 3)
    lhs, (a, b) = compose_check(J, J, 2, 2)
    assert lhs.exact() == F(1, 9)
    assert le(lhs, Product((a, b))) and le(Product((a, b)), lhs)


@settings(max_examples=30)
@given(st.sampled_from([2, 3, 5]), st.lists(st.tuples(st.integers(1, 50), st.integers(1, 50)), min_size=1, max_size=6),
       st.sampled_from([(1, math.inf), (2, 2), (3, F(3, 2)), (math.inf, math.inf), (4, 4)]))
def test_composition_holder(p, pairs, qr):
    q, r = qr
    J = MatrixOperator.diagonal([a for a, _ in pairs], p)
    S = MatrixOperator.diagonal([b for _, b in pairs], p)
    lhs, (a, b) = compose_check(J, S, q, r)
    assert le(lhs, Product((a, b)))


def test_adjoint_examples():
    A = MatrixOperator.from_rows([[1, 3], [3, F(1, 3)]], 3)
    R = RankOneSum.rows_of(A)
    assert nu_q(adjoint(R), 2).exact() == nu_q(R, 2).exact()
    a = np.array([3, 1], dtype=object)
    y = np.array([F(1, 3), 9], dtype=object)
    one = RankOneSum(((a, y),), 3, (2, 2))
    assert nu_q(one, 1).exact() == vector_norm(a, 3) * vector_norm(y, 3)
    assert nu_q(adjoint(one), 1).exact() == nu_q(one, 1).exact()


@pytest.mark.parametrize("r", [1, 2])
def test_adjoint_random_4x4(r):
    rng = np.random.default_rng(r)
    rows = [[F(int(x), int(d)) for x, d in zip(rng.integers(-20, 20, 4), rng.integers(1, 9, 4))] for _ in range(4)]
    A = MatrixOperator.from_rows(rows, 3)
    for R in (RankOneSum.rows_of(A), RankOneSum.columns_of(A)):
        assert le(nu_q(adjoint(R), r), nu_q(R, r))
        assert adjoint(R).to_matrix().equals(A.transpose())


def test_spectral_integral_of_one_and_indicators():
    P = ProjectionValuedMeasure.discrete(4, 3)
    assert spectral_integral([1] * 4, P).equals(MatrixOperator.identity(4, 3))
    A = frozenset({0, 2})
    assert spectral_integral([1, 0, 1, 0], P).equals(P(A))


def test_partition_pvm_norm_is_ess_sup():
    base = Ball.integers(3, 20)
    P = pvm_from_partition(partition(base, 1), base, 2)
    f = [F(1, 9), 3, F(1, 3)]
    assert operator_norm(spectral_integral(f, P)) == essential_sup(f, P) == 9


def test_pvm_cells():
    base = Ball.integers(2, 20)
    single = pvm_from_partition([base], base, 2)
    assert single(frozenset({0})).equals(MatrixOperator.identity(4, 2))
    two = pvm_from_partition(partition(base, 1), base, 2)
    a, b = two(frozenset({0})), two(frozenset({1}))
    assert (a @ b).is_zero()
    assert (a + b).equals(MatrixOperator.identity(4, 2))


def test_depth_one_partition_is_multiplicative():
    p = 5
    base = Ball.integers(p, 20)
    P = pvm_from_partition(partition(base, 1), base, 1)
    sets = [frozenset(s) for k in range(p + 1) for s in itertools.combinations(range(p), k)]
    for A, B in itertools.product(sets[::3], repeat=2):
        assert P(A & B).equals(P(A) @ P(B))


def test_fine_partition_has_null_cells():
    base = Ball.integers(2, 20)
    P = pvm_from_partition(partition(base, 2), base, 1)
    assert sum(P.is_null([i]) for i in range(4)) == 2
    f = [1, 1024, 1, 1024]
    # the heavy cells hold no grid point, so they do not count
    assert essential_sup(f, P) == operator_norm(spectral_integral(f, P))


def test_partition_pvm_rejects_gaps():
    base = Ball.integers(3, 20)
    with pytest.raises(ValueError):
        pvm_from_partition(partition(base, 1)[:2], base, 1)


@settings(max_examples=40)
@given(st.sampled_from([2, 3, 5]), st.sampled_from([1, 2, 3, F(3, 2), math.inf]),
       st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3), min_size=2, max_size=2))
def test_triangle_inequality_for_representations(p, q, rows):
    A = MatrixOperator.from_rows([rows[0], rows[1]], p)
    B = MatrixOperator.from_rows([rows[1], rows[0]], p)
    R1, R2 = RankOneSum.rows_of(A), RankOneSum.columns_of(B)
    assert le(nu_q(R1 + R2, q), Sum((nu_q(R1, q), nu_q(R2, q))))
    assert le(operator_norm((R1 + R2).to_matrix()), nu_q(R1 + R2, q))


@settings(max_examples=30)
@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(-40, 40), min_size=1, max_size=6))
def test_ess_sup_isometry_on_discrete_pvm(p, values):
    P = ProjectionValuedMeasure.discrete(len(values), p)
    I = spectral_integral(values, P)
    assert operator_norm(I) == max(padic_abs(v, p) for v in values)
