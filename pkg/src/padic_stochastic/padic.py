"""p-adic numbers with explicit precision, exact norms and balls.

A nonzero value is stored as ``p**v * u`` where ``u`` is a unit known modulo
``p**N``; ``N`` is the relative precision (number of known digits). A value
that is indistinguishable from zero only remembers its absolute precision,
i.e. it stands for ``O(p**A)``.

Norms are returned as exact :class:`fractions.Fraction` powers of ``p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

Rational = Union[int, Fraction]


class PrecisionError(ArithmeticError):
    """Raised when a requested digit or operation exceeds the known precision."""


class PrimeMismatchError(ValueError):
    """Raised when values over different primes are combined."""


class IndistinguishableFromZero(ZeroDivisionError):
    """Raised when inverting a value whose known digits are all zero."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def int_valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def rational_valuation(x: Rational, p: int) -> float | int:
    x = Fraction(x)
    if x == 0:
        return math.inf
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def power(p: int, k: int) -> Fraction:
    """Exact ``p**k`` for any integer ``k``."""
    return Fraction(p) ** k


class PadicNumber:
    """An element of Q_p known to finite precision.

    Use :func:`from_rational`, :meth:`exact` or :meth:`zero` rather than the
    raw constructor, which takes an already normalized triple.
    """

    __slots__ = ("prime", "_val", "_unit", "_prec")

    def __init__(self, prime: int, val: int | None, unit: int, prec: int):
        # val is None for a zero; prec is then the absolute precision
        self.prime = prime
        self._val = val
        self._unit = unit
        self._prec = prec

    # construction -----------------------------------------------------------

    @staticmethod
    def _make(p: int, v: int, m: int, n: int) -> "PadicNumber":
        """Normalize ``m * p**v + O(p**(v + n))``."""
        if n <= 0:
            return PadicNumber(p, None, 0, v + n)
        m %= p**n
        if m == 0:
            return PadicNumber(p, None, 0, v + n)
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        return PadicNumber(p, v + k, m, n - k)

    @classmethod
    def zero(cls, p: int, absprec: int) -> "PadicNumber":
        _check_prime(p)
        return cls(p, None, 0, absprec)

    @classmethod
    def exact(cls, value: Rational, p: int, absprec: int) -> "PadicNumber":
        """``value`` known modulo ``p**absprec``."""
        _check_prime(p)
        value = Fraction(value)
        if value == 0:
            return cls(p, None, 0, absprec)
        v = rational_valuation(value, p)
        return _from_fraction(value, p, v, absprec - v)

    # basic attributes ------------------------------------------------------

    @property
    def valuation(self) -> float | int:
        return math.inf if self._val is None else self._val

    @property
    def precision(self) -> int:
        """Relative precision: the number of known digits from the valuation on."""
        return 0 if self._val is None else self._prec

    @property
    def absolute_precision(self) -> int:
        return self._prec if self._val is None else self._val + self._prec

    @property
    def unit(self) -> int:
        return self._unit

    def is_zero(self) -> bool:
        return self._val is None

    @property
    def digits(self) -> list[int]:
        """Known digits ``a_v, a_{v+1}, ...`` starting at the valuation."""
        out, m = [], self._unit
        for _ in range(self.precision):
            m, r = divmod(m, self.prime)
            out.append(r)
        return out

    def norm(self) -> Fraction:
        if self._val is None:
            return Fraction(0)
        return power(self.prime, -self._val)

    def lift(self) -> Fraction:
        """The rational whose digits are exactly the known digits."""
        if self._val is None:
            return Fraction(0)
        return self._unit * power(self.prime, self._val)

    def residue(self, k: int) -> int:
        """The integer in ``[0, p**k)`` congruent to this value mod ``p**k``."""
        if self.absolute_precision < k:
            raise PrecisionError(f"need {k} digits, only {self.absolute_precision} known")
        if self._val is None or self._val >= k:
            return 0
        if self._val < 0:
            raise ValueError("value is not in Z_p")
        return (self._unit * self.prime**self._val) % self.prime**k

    def __repr__(self) -> str:
        return f"PadicNumber({self.canonical()})"

    def canonical(self) -> str:
        """Text form ``p:v:digits``; zero is written ``p:inf:A``."""
        if self._val is None:
            return f"{self.prime}:inf:{self._prec}"
        sep = "" if self.prime <= 10 else ","
        return f"{self.prime}:{self._val}:{sep.join(str(d) for d in self.digits)}"

    @classmethod
    def parse(cls, text: str) -> "PadicNumber":
        ps, vs, ds = text.split(":")
        p = int(ps)
        _check_prime(p)
        if vs == "inf":
            return cls(p, None, 0, int(ds))
        digits = [int(c) for c in (ds.split(",") if "," in ds or p > 10 else ds)]
        if not digits or digits[0] == 0 or any(not 0 <= d < p for d in digits):
            raise ValueError(f"malformed p-adic text {text!r}")
        unit = sum(d * p**i for i, d in enumerate(digits))
        return cls(p, int(vs), unit, len(digits))

    # coercion --------------------------------------------------------------

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise PrimeMismatchError(f"cannot combine Q_{self.prime} with Q_{other.prime}")
            return other
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return PadicNumber(self.prime, None, 0, max(self.absolute_precision, 1) + 64)
            v = rational_valuation(other, self.prime)
            n = max(self.precision, self.absolute_precision - v, 1)
            return _from_fraction(other, self.prime, v, n)
        return NotImplemented

    # arithmetic ------------------------------------------------------------

    def __neg__(self) -> "PadicNumber":
        if self._val is None:
            return self
        return PadicNumber(self.prime, self._val, (-self._unit) % self.prime**self._prec, self._prec)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        a = min(self.absolute_precision, other.absolute_precision)
        if self._val is None and other._val is None:
            return PadicNumber(p, None, 0, a)
        if self._val is None:
            x = other
            return PadicNumber._make(p, x._val, x._unit, a - x._val)
        if other._val is None:
            return PadicNumber._make(p, self._val, self._unit, a - self._val)
        e = min(self._val, other._val)
        s = self._unit * p ** (self._val - e) + other._unit * p ** (other._val - e)
        return PadicNumber._make(p, e, s, a - e)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        if self._val is None or other._val is None:
            if self._val is None and other._val is None:
                return PadicNumber(p, None, 0, self._prec + other._prec)
            z, x = (self, other) if self._val is None else (other, self)
            return PadicNumber(p, None, 0, z._prec + x._val)
        n = min(self._prec, other._prec)
        return PadicNumber(p, self._val + other._val, (self._unit * other._unit) % p**n, n)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self._val is None:
            raise IndistinguishableFromZero(f"cannot invert {self.canonical()}")
        m = self.prime**self._prec
        return PadicNumber(self.prime, -self._val, pow(self._unit, -1, m), self._prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = PadicNumber._make(self.prime, 0, 1, max(self.precision, 1))
        if k == 0:
            return result
        base, result = self, None
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # equality is precision-dependent

    def is_integral(self) -> bool:
        return self.valuation >= 0

    def with_precision(self, absprec: int) -> "PadicNumber":
        """Drop digits at positions ``>= absprec``."""
        if absprec > self.absolute_precision:
            raise PrecisionError("cannot add precision that is not known")
        if self._val is None:
            return PadicNumber(self.prime, None, 0, absprec)
        return PadicNumber._make(self.prime, self._val, self._unit, absprec - self._val)


def _from_fraction(x: Fraction, p: int, v: int, n: int) -> PadicNumber:
    """Expand the rational ``x`` of valuation ``v`` to ``n`` relative digits."""
    if n <= 0:
        return PadicNumber(p, None, 0, v + n)
    num, den = x.numerator, x.denominator
    if v > 0:
        num //= p**v
    elif v < 0:
        den //= p ** (-v)
    m = p**n
    return PadicNumber(p, v, (num * pow(den, -1, m)) % m, n)


def from_rational(num: int, den: int, p: int, precision: int) -> PadicNumber:
    """Expand ``num/den`` in Q_p to ``precision`` significant digits.

    Zero is returned as ``O(p**precision)``.
    """
    _check_prime(p)
    if precision <= 0:
        raise ValueError("precision must be positive")
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    x = Fraction(num, den)
    if x == 0:
        return PadicNumber(p, None, 0, precision)
    return _from_fraction(x, p, rational_valuation(x, p), precision)


def valuation(x: PadicNumber) -> float | int:
    return x.valuation


def norm(x: PadicNumber) -> Fraction:
    return x.norm()


def fractional_part(y: PadicNumber) -> Fraction:
    """``{y}_p``: the sum of the digits of ``y`` at negative positions."""
    if y.is_zero() or y.valuation >= 0:
        if y.absolute_precision < 0:
            raise PrecisionError("negative-position digits of y are unknown")
        return Fraction(0)
    k = -y.valuation
    if y.precision < k:
        raise PrecisionError("negative-position digits of y are unknown")
    m = y.prime**k
    return Fraction(y.unit % m, m)


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed ball ``{x : |x - center| <= p**radius_exp}``."""

    center: PadicNumber
    radius_exp: int

    @property
    def prime(self) -> int:
        return self.center.prime

    @property
    def radius(self) -> Fraction:
        return power(self.prime, self.radius_exp)

    @classmethod
    def integers(cls, p: int, absprec: int = 64) -> "Ball":
        """The ball Z_p."""
        return cls(PadicNumber.zero(p, absprec), 0)

    def contains(self, x: PadicNumber) -> bool:
        d = x - self.center
        if d.is_zero() and d.absolute_precision < -self.radius_exp:
            raise PrecisionError("membership is not decided at this precision")
        return d.valuation >= -self.radius_exp

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def normalize(self, x: PadicNumber) -> PadicNumber:
        """Map the ball onto Z_p: ``(x - center) * p**radius_exp``."""
        return (x - self.center) * power(self.prime, self.radius_exp)

    def denormalize(self, u: Rational | PadicNumber, absprec: int | None = None) -> PadicNumber:
        if not isinstance(u, PadicNumber):
            prec = self.center.absolute_precision if absprec is None else absprec
            u = PadicNumber.exact(u, self.prime, prec + self.radius_exp)
        return self.center + u * power(self.prime, -self.radius_exp)

    def is_inside(self, other: "Ball") -> bool:
        return self.radius_exp <= other.radius_exp and other.contains(self.center)

    def is_disjoint(self, other: "Ball") -> bool:
        return not (self.is_inside(other) or other.is_inside(self))

    def __repr__(self) -> str:
        return f"Ball({self.center.canonical()}, p^{self.radius_exp})"


def partition(ball: Ball, depth: int) -> list[Ball]:
    """Split ``ball`` into ``p**depth`` disjoint sub-balls of radius ``p**(k - depth)``.

    The ``i``-th sub-ball is centered at ``center + i * p**(-k)``.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return list(iter_partition(ball, depth))


def iter_partition(ball: Ball, depth: int) -> Iterator[Ball]:
    p, k = ball.prime, ball.radius_exp
    for i in range(p**depth):
        yield Ball(ball.denormalize(i), k - depth)
