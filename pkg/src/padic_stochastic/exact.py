"""Exact comparison of nonnegative reals of the form ``c * prod(b_i ** e_i)``.

Norms such as ``(sum |x_i|^q)^(1/q)`` or L^s norms over finite event sets are
products of rational powers of rationals. Single products compare exactly by
raising to a common integer power; sums of products compare through
certified rational enclosures that are refined until they separate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def root_bounds(x: Fraction, k: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= x**(1/k) <= hi`` with ``hi - lo <= 2**-bits`` (roughly)."""
    if x < 0:
        raise ValueError("root of a negative number")
    if k == 1:
        return x, x
    scale = 1 << bits
    n = x.numerator * scale**k // x.denominator
    r = _iroot(n, k)
    lo = Fraction(r, scale)
    hi = Fraction(r + 1, scale)
    return lo, hi


@dataclass(frozen=True)
class RootProduct:
    """``coefficient * prod(base ** exponent)`` with rational bases >= 0."""

    coefficient: Fraction = Fraction(1)
    factors: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def of(cls, value) -> "RootProduct":
        if isinstance(value, RootProduct):
            return value
        return cls(Fraction(value))

    @classmethod
    def root(cls, base, k) -> "RootProduct":
        """``base ** (1/k)``."""
        return cls(Fraction(1), ((Fraction(base), Fraction(1) / Fraction(k)),))

    def is_zero(self) -> bool:
        return self.coefficient == 0 or any(b == 0 and e > 0 for b, e in self.factors)

    def __mul__(self, other) -> "RootProduct":
        other = RootProduct.of(other)
        return RootProduct(self.coefficient * other.coefficient, self.factors + other.factors)

    __rmul__ = __mul__

    def power(self, k: int) -> "RootProduct":
        return RootProduct(self.coefficient**k, tuple((b, e * k) for b, e in self.factors))

    def _denominator(self) -> int:
        return math.lcm(1, *(e.denominator for _, e in self.factors))

    def integer_power(self, n: int) -> Fraction:
        """``self ** n`` as an exact rational; ``n`` must clear all exponent denominators."""
        val = self.coefficient**n
        for b, e in self.factors:
            ex = e * n
            if ex.denominator != 1:
                raise ValueError("power does not clear the root")
            if b == 0:
                if ex > 0:
                    return Fraction(0)
                raise ZeroDivisionError("zero base with nonpositive exponent")
            val *= b ** int(ex)
        return val

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        if self.is_zero():
            return Fraction(0), Fraction(0)
        lo = hi = Fraction(abs(self.coefficient))
        for b, e in self.factors:
            num = b ** e.numerator if e.numerator >= 0 else (1 / b) ** (-e.numerator)
            l, h = root_bounds(num, e.denominator, bits)
            lo, hi = lo * l, hi * h
        return lo, hi

    def __float__(self) -> float:
        if self.is_zero():
            return 0.0
        logv = math.log(abs(self.coefficient))
        for b, e in self.factors:
            logv += float(e) * math.log(b)
        return math.exp(logv)

    def compare(self, other) -> int:
        """Exact sign of ``self - other``."""
        other = RootProduct.of(other)
        if self.is_zero() or other.is_zero():
            return (not self.is_zero()) - (not other.is_zero())
        n = math.lcm(self._denominator(), other._denominator())
        a, b = self.integer_power(n), other.integer_power(n)
        return (a > b) - (a < b)

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RootProduct, int, Fraction)):
            return NotImplemented
        return self.compare(other) == 0

    def __hash__(self):
        return hash(float(self))

    def __str__(self) -> str:
        parts = [str(self.coefficient)] if self.coefficient != 1 or not self.factors else []
        parts += [f"({b})^({e})" for b, e in self.factors]
        return "*".join(parts)


def sum_le(lhs: Sequence, rhs: Sequence, max_bits: int = 4096) -> bool:
    """Decide ``sum(lhs) <= sum(rhs)`` for RootProducts.

    Enclosures are refined by doubling the bit count. If they still overlap at
    ``max_bits`` the sums are treated as equal (returns True).
    """
    lhs = [RootProduct.of(x) for x in lhs]
    rhs = [RootProduct.of(x) for x in rhs]
    if len(lhs) == 1 and len(rhs) == 1:
        return lhs[0] <= rhs[0]
    bits = 64
    while True:
        llo = sum((x.bounds(bits)[0] for x in lhs), Fraction(0))
        lhi = sum((x.bounds(bits)[1] for x in lhs), Fraction(0))
        rlo = sum((x.bounds(bits)[0] for x in rhs), Fraction(0))
        rhi = sum((x.bounds(bits)[1] for x in rhs), Fraction(0))
        if lhi <= rlo:
            return True
        if llo > rhi:
            return False
        if bits >= max_bits:
            return True
        bits *= 2


def power_mean(weights: Iterable[Fraction], values: Iterable[Fraction], s) -> RootProduct:
    """``(sum w_j v_j^s)^(1/s)`` for an integer ``s >= 1``; ``s = inf`` gives the max
    over events of positive weight."""
    pairs = [(Fraction(w), Fraction(v)) for w, v in zip(weights, values)]
    if s == math.inf:
        return RootProduct.of(max((v for w, v in pairs if w > 0), default=Fraction(0)))
    if int(s) != s or s < 1:
        raise ValueError("exponents must be integers >= 1 or inf")
    s = int(s)
    total = sum((w * v**s for w, v in pairs), Fraction(0))
    return RootProduct.root(total, s) if s != 1 else RootProduct.of(total)


def _rational_power_bounds(x: Fraction, e: Fraction, bits: int, upper: bool) -> Fraction:
    """One-sided rational bound of ``x ** e`` for ``x >= 0`` and rational ``e > 0``."""
    if x == 0:
        return Fraction(0)
    lo, hi = root_bounds(x ** e.numerator, e.denominator, bits)
    return hi if upper else lo


@dataclass(frozen=True)
class PowerSum:
    """``(sum t_i ** q) ** (1/q)`` for rationals ``t_i >= 0`` and rational ``q >= 1``.

    ``q = inf`` means ``max t_i``. Converts to an exact :class:`RootProduct`
    when ``q`` is an integer.
    """

    terms: tuple
    q: object

    def exact(self) -> RootProduct | None:
        if self.q == math.inf:
            return RootProduct.of(max(self.terms, default=Fraction(0)))
        q = Fraction(self.q)
        if q.denominator != 1:
            return None
        total = sum((Fraction(t) ** q.numerator for t in self.terms), Fraction(0))
        return RootProduct.root(total, q.numerator) if q != 1 else RootProduct.of(total)

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        ex = self.exact()
        if ex is not None:
            return ex.bounds(bits)
        q = Fraction(self.q)
        lo = sum((_rational_power_bounds(Fraction(t), q, bits, False) for t in self.terms), Fraction(0))
        hi = sum((_rational_power_bounds(Fraction(t), q, bits, True) for t in self.terms), Fraction(0))
        inv = 1 / q
        return _rational_power_bounds(lo, inv, bits, False), _rational_power_bounds(hi, inv, bits, True)

    def __float__(self) -> float:
        if self.q == math.inf:
            return float(max(self.terms, default=0))
        q = float(self.q)
        return sum(float(t) ** q for t in self.terms) ** (1 / q)


@dataclass(frozen=True)
class Product:
    """Product of nonnegative exact reals."""

    factors: tuple

    def exact(self) -> RootProduct | None:
        out = RootProduct.of(1)
        for f in self.factors:
            e = as_root_product(f)
            if e is None:
                return None
            out = out * e
        return out

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(1)
        for f in self.factors:
            l, h = real_bounds(f, bits)
            lo, hi = lo * l, hi * h
        return lo, hi

    def __float__(self) -> float:
        return math.prod(float(f) for f in self.factors)


@dataclass(frozen=True)
class Sum:
    """Sum of nonnegative exact reals."""

    terms: tuple

    def exact(self) -> RootProduct | None:
        if len(self.terms) == 1:
            return as_root_product(self.terms[0])
        return None

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(0)
        for t in self.terms:
            l, h = real_bounds(t, bits)
            lo, hi = lo + l, hi + h
        return lo, hi

    def __float__(self) -> float:
        return sum(float(t) for t in self.terms)


def as_root_product(x) -> RootProduct | None:
    if isinstance(x, RootProduct):
        return x
    if isinstance(x, (int, Fraction)):
        return RootProduct.of(x)
    if isinstance(x, (PowerSum, Product, Sum)):
        return x.exact()
    raise TypeError(f"not an exact real: {x!r}")


def real_bounds(x, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(x, (int, Fraction)):
        return Fraction(x), Fraction(x)
    return x.bounds(bits)


def le(x, y, max_bits: int = 4096) -> bool:
    """Decide ``x <= y`` for exact reals.

    Exact when both sides are root products; otherwise by refining enclosures,
    treating sides that agree to ``max_bits`` bits as equal.
    """
    a, b = as_root_product(x), as_root_product(y)
    if a is not None and b is not None:
        return a <= b
    bits = 64
    while True:
        xl, xh = real_bounds(x, bits)
        yl, yh = real_bounds(y, bits)
        if xh <= yl:
            return True
        if xl > yh:
            return False
        if bits >= max_bits:
            return True
        bits *= 2
