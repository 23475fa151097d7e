"""Function spaces over balls of Q_p.

Mahler (binomial) expansions, difference quotients, grid estimates of C^n
norms, exact norms of polynomials and the digit-truncation approximation of
the identity used to discretize every series in this package.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .padic import Ball, PadicNumber, PrecisionError, power, rational_valuation


def padic_abs(x, p: int) -> Fraction:
    """Exact p-adic norm of a PadicNumber, rational or tuple (max over entries)."""
    if isinstance(x, PadicNumber):
        return x.norm()
    if isinstance(x, (tuple, list)):
        return max((padic_abs(c, p) for c in x), default=Fraction(0))
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    return power(p, -rational_valuation(x, p))


def floor_log(m: int, p: int) -> int:
    """Largest ``j`` with ``p**j <= m`` (``m >= 1``)."""
    j = 0
    while p ** (j + 1) <= m:
        j += 1
    return j


def binomial(u: PadicNumber, m: int) -> PadicNumber:
    """The binomial polynomial ``C(u, m)`` at ``u`` in Z_p.

    The result is computed from an integer lift of ``u`` and loses
    ``floor(log_p m)`` digits of absolute precision, the Lipschitz constant of
    ``C(., m)`` on Z_p.
    """
    p = u.prime
    a = u.absolute_precision
    if m == 0:
        return PadicNumber.exact(1, p, max(a, 1))
    if u.valuation < 0:
        raise ValueError("binomial polynomials are evaluated on Z_p")
    lift = u.residue(a) if a > 0 else 0
    return PadicNumber.exact(math.comb(lift, m), p, a - floor_log(m, p))


# vector helpers: values are scalars or tuples of scalars -----------------------

def _add(a, b):
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


def _sub(a, b):
    if isinstance(a, tuple):
        return tuple(x - y for x, y in zip(a, b))
    return a - b


def _scale(c, a):
    if isinstance(a, tuple):
        return tuple(c * x for x in a)
    return c * a


def _forward_differences(values: Sequence) -> list:
    """Mahler coefficients ``a_m = sum_k (-1)^(m-k) C(m,k) f(k)`` of the samples."""
    out, row = [], list(values)
    while row:
        out.append(row[0])
        row = [_sub(row[i + 1], row[i]) for i in range(len(row) - 1)]
    return out


# polynomials ---------------------------------------------------------------------

class Polynomial:
    """Polynomial with rational or p-adic coefficients, lowest degree first."""

    def __init__(self, coefficients: Sequence, prime: int):
        coeffs = list(coefficients)
        while len(coeffs) > 1 and _is_zero(coeffs[-1]):
            coeffs.pop()
        self.coefficients = coeffs or [0]
        self.prime = prime

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self, k: int = 1) -> "Polynomial":
        coeffs = self.coefficients
        for _ in range(k):
            coeffs = [i * c for i, c in enumerate(coeffs)][1:] or [0]
        return Polynomial(coeffs, self.prime)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + [0] * (n - len(self.coefficients))
        b = other.coefficients + [0] * (n - len(other.coefficients))
        return Polynomial([x + y for x, y in zip(a, b)], self.prime)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([other * c for c in self.coefficients], self.prime)
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out, self.prime)

    __rmul__ = __mul__

    def compose_affine(self, a, b) -> "Polynomial":
        """The polynomial ``u -> self(a + b*u)``."""
        result = Polynomial([0], self.prime)
        lin = Polynomial([a, b], self.prime)
        for c in reversed(self.coefficients):
            result = result * lin + Polynomial([c], self.prime)
        return result

    def gauss_norm(self) -> Fraction:
        return max(padic_abs(c, self.prime) for c in self.coefficients)

    def sup_norm(self, domain: Ball) -> Fraction:
        """Exact ``sup |f|`` over the ball, read off the Mahler coefficients."""
        g = self.compose_affine(domain.center, power(domain.prime, -domain.radius_exp))
        return max(padic_abs(a, self.prime) for a in _forward_differences([g(i) for i in range(g.degree + 1)]))

    def c1_norm(self, domain: Ball) -> Fraction:
        """Exact ``max(sup|f|, sup |(f(x+s)-f(x))/s|)`` over x in the ball, |s| <= radius.

        The quotient is a polynomial in the normalized pair (u, sigma) and its
        sup over Z_p x Z_p is the largest two-variable Mahler coefficient.
        """
        p, k = domain.prime, domain.radius_exp
        g = self.compose_affine(domain.center, power(p, -k))
        d = g.degree
        if d == 0:
            return self.sup_norm(domain)
        # D(u, s) = p^k * sum_i g_i sum_{j>=1} C(i,j) u^(i-j) s^(j-1)
        terms = [(i - j, j - 1, math.comb(i, j) * g.coefficients[i])
                 for i in range(1, d + 1) for j in range(1, i + 1)]
        scale = power(p, k)

        def quotient(u, s):
            return scale * sum(c * u**a * s**b for a, b, c in terms)

        grid = [[quotient(u, s) for s in range(d)] for u in range(d)]
        rows = [_forward_differences(r) for r in grid]
        sup = Fraction(0)
        for j in range(d):
            for a in _forward_differences([rows[i][j] for i in range(d)]):
                sup = max(sup, padic_abs(a, p))
        return max(sup, self.sup_norm(domain))


def _is_zero(c) -> bool:
    if isinstance(c, PadicNumber):
        return c.is_zero()
    return c == 0


# Mahler series --------------------------------------------------------------------

@dataclass(frozen=True)
class MahlerSeries:
    """``x -> sum_m a_m C(u(x), m)`` with ``u`` the normalized coordinate of the domain.

    Coefficients are scalars or equal-length tuples (vector-valued series,
    one Mahler series per coordinate).
    """

    coefficients: tuple
    domain: Ball

    @property
    def prime(self) -> int:
        return self.domain.prime

    def __call__(self, x: PadicNumber):
        return mahler_eval(self, x)

    def sup_norm(self) -> Fraction:
        """Exact sup norm: Mahler coefficients form an orthonormal basis."""
        return max((padic_abs(a, self.prime) for a in self.coefficients), default=Fraction(0))

    def c1_bound(self) -> Fraction:
        """Upper bound for the C^1 norm from the Lipschitz constants of C(., m)."""
        p, k = self.prime, self.domain.radius_exp
        lip = max((padic_abs(a, p) * power(p, floor_log(m, p) - k)
                   for m, a in enumerate(self.coefficients) if m > 0), default=Fraction(0))
        return max(self.sup_norm(), lip)


def mahler_expand(samples: Sequence, M: int, prime: int | None = None,
                  domain: Ball | None = None) -> MahlerSeries:
    """Mahler coefficients of the function with values ``samples[i]`` at ``u = i``."""
    if len(samples) < M + 1:
        raise ValueError(f"need {M + 1} samples, got {len(samples)}")
    if domain is None:
        if prime is None:
            prime = next((s.prime for s in samples if isinstance(s, PadicNumber)), None)
        if prime is None:
            raise ValueError("prime or domain required")
        domain = Ball.integers(prime)
    return MahlerSeries(tuple(_forward_differences(samples[: M + 1])), domain)


def mahler_eval(s: MahlerSeries, x: PadicNumber):
    u = s.domain.normalize(x)
    if u.valuation < 0:
        raise ValueError("point outside the domain of the series")
    total = PadicNumber.zero(s.prime, u.absolute_precision)
    if s.coefficients and isinstance(s.coefficients[0], tuple):
        total = tuple(total for _ in s.coefficients[0])
    for m, a in enumerate(s.coefficients):
        total = _add(total, _scale(binomial(u, m), a))
    return total


# C^n functions ------------------------------------------------------------------

@dataclass(frozen=True)
class CnFunction:
    """A function on a ball declared to be of class C^order.

    ``c0_bound`` and ``c1_bound`` are certified upper bounds of the norms when
    known; ``derivative`` is the exact derivative when available.
    """

    rule: Callable
    order: int
    domain: Ball
    derivative: Callable | None = None
    c0_bound: Fraction | None = None
    c1_bound: Fraction | None = None

    def __call__(self, x):
        return self.rule(x)

    @classmethod
    def polynomial(cls, poly: Polynomial, domain: Ball, order: int = 8) -> "CnFunction":
        return cls(poly, order, domain, derivative=poly.derivative(),
                   c0_bound=poly.sup_norm(domain), c1_bound=poly.c1_norm(domain))

    @classmethod
    def vector_polynomial(cls, polys: Sequence[Polynomial], domain: Ball, order: int = 8) -> "CnFunction":
        """Coordinatewise polynomial map into K^d (sup norm over coordinates)."""
        polys = tuple(polys)
        derivs = tuple(q.derivative() for q in polys)
        return cls(lambda x: tuple(q(x) for q in polys), order, domain,
                   derivative=lambda x: tuple(q(x) for q in derivs),
                   c0_bound=max(q.sup_norm(domain) for q in polys),
                   c1_bound=max(q.c1_norm(domain) for q in polys))

    @classmethod
    def mahler(cls, series: MahlerSeries, order: int = 1) -> "CnFunction":
        return cls(series, order, series.domain, c0_bound=series.sup_norm(), c1_bound=series.c1_bound())


def difference_quotient(f: Callable, n: int, x: PadicNumber, hs: Sequence, zetas: Sequence,
                        domain: Ball | None = None):
    """``Phi^n f(x; h_1..h_n; z_1..z_n)``, built from first-order quotients.

    The quotient in the last index is applied outermost:
    ``Phi^n f(x) = (Phi^(n-1) f(x + z_n h_n) - Phi^(n-1) f(x)) / z_n``.
    """
    if len(hs) < n or len(zetas) < n:
        raise ValueError("need n increments and n scalars")
    if domain is None:
        domain = getattr(f, "domain", None)
    if n == 0:
        if domain is not None and not domain.contains(x):
            raise ValueError("argument escapes the domain")
        return f(x)
    z = zetas[n - 1]
    if (isinstance(z, PadicNumber) and z.is_zero()) or (not isinstance(z, PadicNumber) and z == 0):
        raise ZeroDivisionError("difference quotient at zeta = 0 has no extension rule here")
    inner = lambda y: difference_quotient(f, n - 1, y, hs, zetas, domain)  # noqa: E731
    shifted = x + z * hs[n - 1]
    num = _sub(inner(shifted), inner(x))
    inv = 1 / z if isinstance(z, PadicNumber) else Fraction(1) / Fraction(z)
    return _scale(inv, num)


def grid_points(domain: Ball, depth: int) -> list[PadicNumber]:
    """Representatives ``center + i * p**(-k)`` for ``0 <= i < p**depth``."""
    return [domain.denormalize(i) for i in range(domain.prime**depth)]


def grid_increments(domain: Ball, depth: int) -> list[PadicNumber]:
    """Nonzero increments ``c * p**j`` (scaled to the domain radius), ``0 <= j < depth``."""
    p, k = domain.prime, domain.radius_exp
    prec = domain.center.absolute_precision + k
    return [PadicNumber.exact(c * p**j, p, prec) * power(p, -k)
            for j in range(depth) for c in range(1, p)]


def cn_norm_estimate(f: Callable, n: int, depth: int, domain: Ball | None = None) -> Fraction:
    """Lower bound of ``||f||_{C^n}`` from a finite grid.

    Takes the max of ``|Phi^k f(x; 1..1; z_1..z_k)|`` for ``k <= n`` over the
    grid of depth ``depth`` and nonzero increments ``z`` of the same depth.
    The grids are nested, so the estimate is nondecreasing in ``depth``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    domain = domain if domain is not None else f.domain
    p = domain.prime
    xs = grid_points(domain, depth)
    zs = grid_increments(domain, depth)
    best = Fraction(0)
    for x in xs:
        best = max(best, padic_abs(f(x), p))
    ones = [1] * n
    for k in range(1, n + 1):
        for x in xs:
            for combo in itertools.product(zs, repeat=k):
                best = max(best, padic_abs(difference_quotient(f, k, x, ones, combo, domain), p))
    return best


# approximation of the identity -------------------------------------------------

class ApproximationOfIdentity:
    """Digit truncation on a ball ``T = B(t0, p**k)``.

    With ``u = (t - t0) p**k`` in Z_p, ``sigma_n(t) = t0 + p**(-k) (u mod p**n)``.
    Distances are measured after mapping T onto the radius ``1/p`` ball, i.e.
    divided by ``scale = p * p**k``; then ``rho = 1/p`` satisfies the four
    axioms exactly. Subclasses may override :meth:`truncate`.
    """

    def __init__(self, domain: Ball):
        self.domain = domain
        self.prime = domain.prime
        self.rho = Fraction(1, self.prime)
        self.scale = domain.radius * self.prime

    @property
    def t0(self) -> PadicNumber:
        return self.domain.center

    def truncate(self, n: int, u: PadicNumber) -> int:
        return u.residue(n)

    def normalized(self, t: PadicNumber) -> PadicNumber:
        u = self.domain.normalize(t)
        if u.valuation < 0:
            raise ValueError(f"{t.canonical()} is outside the domain")
        return u

    def max_terms(self, t: PadicNumber) -> int:
        """Largest ``n`` for which ``sigma_n(t)`` is determined by the known digits."""
        return max(self.normalized(t).absolute_precision, 0)

    def __call__(self, n: int, t: PadicNumber) -> PadicNumber:
        u = self.normalized(t)
        if n == 0:
            return self.t0
        if u.absolute_precision < n:
            raise PrecisionError(f"sigma_{n} needs {n} digits of the normalized point")
        return self.domain.denormalize(self.truncate(n, u), absprec=max(u.absolute_precision, n))

    def nodes(self, t: PadicNumber, count: int) -> list[PadicNumber]:
        """``[sigma_0(t), ..., sigma_count(t)]``."""
        return [self(n, t) for n in range(count + 1)]

    def normalized_distance(self, x: PadicNumber, y: PadicNumber) -> Fraction:
        return (x - y).norm() / self.scale


def sigma(aoi: ApproximationOfIdentity, n: int, t: PadicNumber) -> PadicNumber:
    return aoi(n, t)


def axiom_violations(aoi: ApproximationOfIdentity, points: Sequence[PadicNumber], n_max: int) -> dict:
    """Count failures of the four axioms over the given points and ``n <= n_max``.

    (i) sigma_0 = t0; (ii) sigma_m sigma_n = sigma_n sigma_m for m >= n;
    (iii) close points share sigma_n; (iv) |sigma_n(x) - x| < rho^n.
    Distances are normalized by ``aoi.scale``. Pairs for (iii) are consecutive
    points of the list. Nodes are compared through their truncation integers
    in the normalized coordinate, where a normalized distance is ``|u - v| / p``.
    """
    out = {"i": 0, "ii": 0, "iii": 0, "iv": 0}
    p, rho = aoi.prime, aoi.rho
    us = [aoi.normalized(x) for x in points]

    def trunc(n, u):
        return 0 if n == 0 else aoi.truncate(n, u)

    for x, u in zip(points, us):
        if not aoi(0, x) == aoi.t0:
            out["i"] += 1
        prec = max(u.absolute_precision, n_max)
        sig = [trunc(n, u) for n in range(n_max + 1)]
        nodes = [PadicNumber.exact(j, p, prec) for j in sig]
        for n in range(n_max + 1):
            if not (u - sig[n]).norm() / p < rho**n:
                out["iv"] += 1
            for m in range(n, n_max + 1):
                if trunc(m, nodes[n]) != trunc(n, nodes[m]):
                    out["ii"] += 1
    for u, v in zip(us, us[1:]):
        d = (u - v).norm() / p
        for n in range(n_max + 1):
            if d < rho**n and trunc(n, u) != trunc(n, v):
                out["iii"] += 1
    return out
