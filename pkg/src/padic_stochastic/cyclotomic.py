"""Exact complex arithmetic for measure weights and character sums.

:class:`ComplexRational` is ``re + i*im`` with rational parts.
:class:`CyclotomicSum` is a finite sum ``sum_e c_e * exp(2*pi*i*e)`` over
rational exponents ``e`` taken mod 1, with ComplexRational coefficients.
Two sums are compared exactly through a unique normal form in a cyclotomic
field over Q.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping


@dataclass(frozen=True)
class ComplexRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "ComplexRational":
        if isinstance(x, ComplexRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        return cls(Fraction(x), Fraction(0))

    def __add__(self, other):
        other = ComplexRational.of(other)
        return ComplexRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __sub__(self, other):
        other = ComplexRational.of(other)
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexRational.of(other) - self

    def __mul__(self, other):
        other = ComplexRational.of(other)
        return ComplexRational(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ComplexRational.of(other)
        d = other.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero")
        num = self * other.conjugate()
        return ComplexRational(num.re / d, num.im / d)

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def l1(self) -> Fraction:
        """``|re| + |im|``: the variation contribution of one weight."""
        return abs(self.re) + abs(self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ComplexRational.of(other)
        if not isinstance(other, ComplexRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"{self.re}+{self.im}i"

    def to_json(self) -> list[str]:
        return [str(self.re), str(self.im)]


ZERO = ComplexRational()
ONE = ComplexRational(Fraction(1))


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _exact_divide(num, cyclotomic_polynomial(d))
    return tuple(num)


def _exact_divide(num: list, den: tuple) -> list:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


def _reduce(coeffs: list, modulus: tuple) -> tuple:
    """Remainder of a rational polynomial modulo a monic integer polynomial."""
    coeffs = list(coeffs)
    deg = len(modulus) - 1
    for i in range(len(coeffs) - 1, deg - 1, -1):
        c = coeffs[i]
        if c:
            for j, m in enumerate(modulus):
                coeffs[i - deg + j] -= c * m
    return tuple(coeffs[:deg])


class CyclotomicSum:
    """``sum_e c_e * exp(2 pi i e)`` with exponents ``e`` in [0, 1)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean: dict[Fraction, ComplexRational] = {}
        for e, c in (terms or {}).items():
            e = Fraction(e) % 1
            c = ComplexRational.of(c)
            clean[e] = clean.get(e, ZERO) + c
        self.terms = {e: c for e, c in clean.items() if not c.is_zero()}

    @classmethod
    def root(cls, exponent, coefficient=ONE) -> "CyclotomicSum":
        return cls({Fraction(exponent): coefficient})

    def __add__(self, other: "CyclotomicSum") -> "CyclotomicSum":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, ZERO) + c
        return CyclotomicSum(out)

    def __mul__(self, other) -> "CyclotomicSum":
        if not isinstance(other, CyclotomicSum):
            c = ComplexRational.of(other)
            return CyclotomicSum({e: v * c for e, v in self.terms.items()})
        out: dict[Fraction, ComplexRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1 + e2) % 1
                out[e] = out.get(e, ZERO) + c1 * c2
        return CyclotomicSum(out)

    __rmul__ = __mul__

    def order(self) -> int:
        return math.lcm(1, *(e.denominator for e in self.terms))

    def normal_form(self, order: int | None = None) -> tuple:
        """Rational coordinates in the power basis of ``Q(exp(2 pi i / L))``.

        ``L`` is ``order`` (default: the exponent order) made divisible by 4 so
        that ``i = exp(2 pi i / 4)`` is folded into the root-of-unity part and
        every coefficient is rational; the remainder modulo the L-th cyclotomic
        polynomial is then a unique normal form.
        """
        n = self.order() if order is None else order
        L = math.lcm(n, 4)
        coeffs = [Fraction(0)] * L
        for e, c in self.terms.items():
            k = e * L
            if k.denominator != 1:
                raise ValueError("order does not clear the exponents")
            k = int(k)
            coeffs[k] += c.re
            coeffs[(k + L // 4) % L] += c.im
        return _reduce(coeffs, cyclotomic_polynomial(L))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclotomicSum):
            if isinstance(other, (int, Fraction, ComplexRational)):
                other = CyclotomicSum({0: other})
            else:
                return NotImplemented
        n = math.lcm(self.order(), other.order())
        return self.normal_form(n) == other.normal_form(n)

    __hash__ = None

    def __complex__(self) -> complex:
        return sum((complex(c) * cmath.exp(2j * math.pi * float(e)) for e, c in self.terms.items()), 0j)

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*e({e})" for e, c in sorted(self.terms.items()))
        return f"CyclotomicSum({body or '0'})"
