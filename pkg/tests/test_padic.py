from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_stochastic.padic import (
    Ball,
    IndistinguishableFromZero,
    PadicNumber,
    PrimeMismatchError,
    fractional_part,
    from_rational,
    norm,
    partition,
    valuation,
)

primes = st.sampled_from([2, 3, 5, 7])


def test_one_in_q5():
    x = from_rational(1, 1, 5, 10)
    assert x.valuation == 0
    assert x.digits == [1] + [0] * 9


def test_fifty_in_q5():
    x = from_rational(50, 1, 5, 10)
    assert x.valuation == 2
    assert x.digits[0] == 2


def test_one_third_in_q2():
    x = from_rational(1, 3, 2, 6)
    assert x.valuation == 0
    assert x.digits == [1, 1, 0, 1, 0, 1]
    assert (x * 3).residue(6) == 1


def test_inverse_of_three_matches_one_third():
    three = from_rational(3, 1, 2, 6)
    assert three.inverse().digits == from_rational(1, 3, 2, 6).digits


def test_add_zero_is_identity():
    x = from_rational(7, 9, 3, 12)
    assert x + PadicNumber.zero(3, 20) == x


def test_norm_multiplies():
    x, y = from_rational(5, 1, 5, 10), from_rational(25, 1, 5, 10)
    assert (x * y).norm() == Fraction(1, 125)


def test_valuation_and_norm_examples():
    assert valuation(PadicNumber.zero(3, 10)) == float("inf")
    assert valuation(PadicNumber.exact(9 * 7, 3, 10)) == 2
    assert norm(PadicNumber.exact(Fraction(1, 3), 3, 10)) == 3


@pytest.mark.parametrize("value, p, expected", [
    (Fraction(1, 2), 2, Fraction(1, 2)),
    (Fraction(7, 4), 2, Fraction(3, 4)),
    (Fraction(10), 3, Fraction(0)),
    (Fraction(2, 9), 3, Fraction(2, 9)),
])
def test_fractional_part(value, p, expected):
    assert fractional_part(PadicNumber.exact(value, p, 10)) == expected


def test_partition_of_z5_depth_one():
    cells = partition(Ball.integers(5, 10), 1)
    assert len(cells) == 5
    assert [c.center.lift() for c in cells] == [0, 1, 2, 3, 4]
    assert all(c.radius == Fraction(1, 5) for c in cells)


def test_partition_of_z2_depth_two():
    cells = partition(Ball.integers(2, 10), 2)
    assert [c.center.lift() for c in cells] == [0, 1, 2, 3]


def test_mixed_primes_rejected():
    with pytest.raises(PrimeMismatchError):
        PadicNumber.exact(1, 2, 5) + PadicNumber.exact(1, 3, 5)


def test_inverse_of_zero_rejected():
    with pytest.raises(IndistinguishableFromZero):
        PadicNumber.zero(3, 5).inverse()


def test_canonical_round_trip():
    x = from_rational(-17, 45, 3, 12)
    assert PadicNumber.parse(x.canonical()) == x
    assert PadicNumber.zero(5, 7).canonical() == "5:inf:7"


def test_precision_tracks_cancellation():
    x = PadicNumber.exact(1, 3, 10)
    y = PadicNumber.exact(1 + 3**4, 3, 10)
    d = y - x
    assert d.valuation == 4
    assert d.absolute_precision == 10


def test_reflected_operators():
    x = PadicNumber.exact(Fraction(2, 3), 3, 10)
    assert (1 - x) == PadicNumber.exact(Fraction(1, 3), 3, 10)
    assert (2 * x) == x + x
    assert (1 / x) * x == PadicNumber.exact(1, 3, 9)


def _padic(p):
    return st.builds(lambda n, d, v: PadicNumber.exact(Fraction(n, d) * Fraction(p) ** v, p, 30),
                     st.integers(-10**6, 10**6), st.integers(1, 10**4).filter(lambda d: d % p), st.integers(-3, 3))


@st.composite
def triples(draw):
    p = draw(primes)
    return p, draw(_padic(p)), draw(_padic(p)), draw(_padic(p))


@given(triples())
def test_strong_triangle_inequality(t):
    _, x, y, _ = t
    s = (x + y).norm()
    assert s <= max(x.norm(), y.norm())
    if x.norm() != y.norm():
        assert s == max(x.norm(), y.norm())


@given(triples())
def test_ring_laws(t):
    _, x, y, z = t
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(triples())
def test_exact_agrees_with_rationals(t):
    p, x, y, _ = t
    xy = x * y
    assert PadicNumber.exact(x.lift() * y.lift(), p, xy.absolute_precision) == xy
    s = x + y
    assert PadicNumber.exact(x.lift() + y.lift(), p, s.absolute_precision) == s


@settings(max_examples=50)
@given(primes, st.integers(1, 10**6), st.integers(1, 10**6))
def test_inverse_multiplies_to_one(p, a, b):
    if a % p == 0 or b % p == 0:
        return
    x = from_rational(a, b, p, 15)
    assert (x * x.inverse() - 1).is_zero()


@given(triples())
def test_ball_normalize_round_trip(t):
    p, x, y, _ = t
    k = -int(min(x.valuation, 0)) if x.valuation != float("inf") else 0
    T = Ball(PadicNumber.exact(0, p, 40), k)
    if T.contains(y):
        u = T.normalize(y)
        assert u.valuation >= 0
        assert T.denormalize(u) == y
