"""Sampled processes on C^0(T, K), the stochastic integral and discrete Ito identities.

A path is ``w(t) = sum_{m=1}^M alpha_m zeta_m C(u(t), m)`` where ``u`` is the
normalized coordinate of T (so ``w(t0) = 0``) and the ``zeta_m`` are
Haar-uniform on Z_p, drawn digit by digit from a counter-based generator.

The Ito checks evaluate both sides along the same sigma-nodes
``t_n = sigma_n(t)``: the state follows ``xi_{n+1} = xi_n + a(t_n) dt_n +
E(t_n) dw_n`` and every right-hand term is an antiderivative computed by
:mod:`.antiderivation`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .antiderivation import (
    AntiderivativeResult,
    MultilinearKernel,
    SimpleRandomField,
    antiderive_multilinear,
    lq_bound_check,
)
from .function_spaces import (
    ApproximationOfIdentity,
    CnFunction,
    MahlerSeries,
    Polynomial,
    binomial,
    floor_log,
    padic_abs,
)
from .padic import Ball, PadicNumber, int_valuation, power

__all__ = [
    "ProcessLaw", "ProcessPath", "sample_path", "increment_law_check", "independence_check",
    "stochastic_integral", "bilinearity_check", "lq_bound_check", "SimpleRandomField",
    "JointPolynomial", "ItoReport", "ito_verify_polynomial", "ito_verify_analytic",
    "ito_verify_joint", "ito_cross_check", "required_precision_uplift",
]


# laws and paths ---------------------------------------------------------------

@dataclass(frozen=True)
class ProcessLaw:
    """Coefficient scales ``alpha_0..alpha_M`` on the Mahler basis of ``domain``.

    ``alpha_0`` multiplies ``Q_0 - Q_0(t0) = 0`` and has no effect. The norms
    ``|alpha_m|`` (m >= 1) must be non-increasing; ``precision`` is the
    number of digits drawn for each ``zeta_m``.
    """

    prime: int
    alphas: tuple
    domain: Ball
    precision: int = 20

    def __post_init__(self):
        if len(self.alphas) < 2:
            raise ValueError("need at least alpha_0 and alpha_1")
        norms = [padic_abs(a, self.prime) for a in self.alphas[1:]]
        if any(b > a for a, b in zip(norms, norms[1:])):
            raise ValueError("coefficient norms must be non-increasing")
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @classmethod
    def default(cls, p: int, M: int | None = None, precision: int = 20,
                domain: Ball | None = None) -> "ProcessLaw":
        """``alpha_0 = 1`` and ``alpha_m = p**(2 floor(log_p m))``; ``M`` defaults to ``p**2``."""
        M = p**2 if M is None else M
        alphas = (Fraction(1),) + tuple(Fraction(p ** (2 * floor_log(m, p))) for m in range(1, M + 1))
        return cls(p, alphas, domain or Ball.integers(p), precision)

    @classmethod
    def degenerate(cls, p: int, M: int = 2, precision: int = 20) -> "ProcessLaw":
        """Every scale beyond ``alpha_0`` is zero, so every path is 0."""
        return cls(p, (Fraction(1),) + (Fraction(0),) * M, Ball.integers(p), precision)

    @property
    def M(self) -> int:
        return len(self.alphas) - 1

    def valuations(self) -> list:
        return [math.inf if Fraction(a) == 0 else _val(a, self.prime) for a in self.alphas]

    def with_precision(self, precision: int) -> "ProcessLaw":
        return ProcessLaw(self.prime, self.alphas, self.domain, precision)


def _val(a, p: int):
    if isinstance(a, PadicNumber):
        return a.valuation
    a = Fraction(a)
    return int_valuation(a.numerator, p) - int_valuation(a.denominator, p)


def _generator(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _draw_digits(p: int, seed: int, stream: int, shape) -> np.ndarray:
    return _generator(seed, stream).integers(0, p, size=shape, dtype=np.int64)


class ProcessPath:
    """One sampled path; values are cached by point."""

    def __init__(self, law: ProcessLaw, seed: int):
        self.law = law
        self.seed = seed
        p, P = law.prime, law.precision
        digits = _draw_digits(p, seed, 0, (P, law.M + 1))
        weights = np.array([p**j for j in range(P)], dtype=object)
        self.zetas = tuple(int(x) for x in weights.dot(digits.astype(object)))
        coeffs = [PadicNumber.zero(p, P)]
        for m in range(1, law.M + 1):
            coeffs.append(PadicNumber.exact(self.zetas[m], p, P) * law.alphas[m])
        self.series = MahlerSeries(tuple(coeffs), law.domain)
        self._cache: dict[str, PadicNumber] = {}

    @property
    def prime(self) -> int:
        return self.law.prime

    @property
    def coefficients(self) -> tuple:
        return self.series.coefficients

    def __call__(self, t) -> PadicNumber:
        t = _point(t, self.prime, self.law.precision, self.law.domain)
        key = t.canonical()
        if key not in self._cache:
            self._cache[key] = self.series(t)
        return self._cache[key]

    @property
    def field(self) -> CnFunction:
        return CnFunction(self, 1, self.law.domain, c0_bound=self.series.sup_norm(),
                          c1_bound=self.series.c1_bound())

    def sup_norm(self) -> Fraction:
        return self.series.sup_norm()

    def with_precision(self, precision: int) -> "ProcessPath":
        """The same draw with more digits per coefficient (digit rows are a prefix)."""
        return ProcessPath(self.law.with_precision(precision), self.seed)

    def node_values(self, t, count: int) -> list[tuple[int, PadicNumber, PadicNumber]]:
        aoi = ApproximationOfIdentity(self.law.domain)
        t = _point(t, self.prime, self.law.precision, self.law.domain)
        return [(n, v, self(v)) for n, v in enumerate(aoi.nodes(t, min(count, aoi.max_terms(t))))]

    def to_json(self) -> dict:
        return {"seed": self.seed, "prime": self.prime, "precision": self.law.precision,
                "coefficients": [c.canonical() for c in self.coefficients]}


def sample_path(law: ProcessLaw, seed: int) -> ProcessPath:
    return ProcessPath(law, seed)


def _point(t, p: int, precision: int, domain: Ball | None = None) -> PadicNumber:
    if isinstance(t, PadicNumber):
        return t
    shift = domain.radius_exp if domain is not None else 0
    return PadicNumber.exact(t, p, precision - shift)


# process statistics -------------------------------------------------------------

@dataclass
class IncrementReport:
    tv: float
    exact: list  # Fractions, one per residue class mod p**depth
    empirical: list  # counts
    samples: int


def _increment_coefficients(law: ProcessLaw, t, u, depth: int) -> list[int]:
    """``alpha_m (C(t, m) - C(u, m))`` mod ``p**depth`` as integers."""
    p, M = law.prime, law.M
    prec = depth + floor_log(M, p) + 4
    T = law.domain
    xt = T.normalize(_point(t, p, prec, T).with_precision(prec - T.radius_exp))
    xu = T.normalize(_point(u, p, prec, T).with_precision(prec - T.radius_exp))
    out = [0]
    for m in range(1, M + 1):
        a = law.alphas[m]
        if Fraction(a) == 0 if not isinstance(a, PadicNumber) else a.is_zero():
            out.append(0)
            continue
        g = (binomial(xt, m) - binomial(xu, m)) * a
        if not g.is_zero() and g.valuation < 0:
            raise ValueError("increment coefficients must be integral")
        out.append(g.residue(depth))
    return out


def _check_depth(law: ProcessLaw, depth: int) -> None:
    v = law.valuations()[law.M]
    if depth > v:
        raise ValueError(f"depth {depth} resolves coefficients beyond the truncation M={law.M}")
    if depth > law.precision:
        raise ValueError("depth exceeds the sampled precision")


def _increment_samples(law: ProcessLaw, g: Sequence[int], depth: int, digits: np.ndarray) -> np.ndarray:
    p = law.prime
    n = p**depth
    pw = np.array([p**j for j in range(depth)], dtype=np.int64)
    zeta = np.tensordot(digits, pw, axes=([1], [0])) % n  # (S, M+1)
    return (zeta * (np.asarray(g, dtype=np.int64) % n)).sum(axis=1) % n


def increment_distribution(law: ProcessLaw, t, u, depth: int) -> list[Fraction]:
    """Exact law of ``w(t) - w(u)`` mod ``p**depth`` by enumerating each ``zeta_m`` mod ``p**depth``."""
    _check_depth(law, depth)
    n = law.prime**depth
    dist = [Fraction(0)] * n
    dist[0] = Fraction(1)
    for g in _increment_coefficients(law, t, u, depth):
        step = [Fraction(0)] * n
        for z in range(n):
            step[(g * z) % n] += Fraction(1, n)
        out = [Fraction(0)] * n
        for a, wa in enumerate(dist):
            if wa:
                for b, wb in enumerate(step):
                    if wb:
                        out[(a + b) % n] += wa * wb
        dist = out
    return dist


def increment_law_check(law: ProcessLaw, t, u, depth: int, samples: int, seed: int = 0) -> IncrementReport:
    """Total-variation distance between sampled and exact increment laws on depth-``depth`` cells."""
    _check_depth(law, depth)
    p = law.prime
    digits = _draw_digits(p, seed, 1, (samples, depth, law.M + 1))
    inc = _increment_samples(law, _increment_coefficients(law, t, u, depth), depth, digits)
    counts = np.bincount(inc, minlength=p**depth)
    exact = increment_distribution(law, t, u, depth)
    tv = 0.5 * sum(abs(c / samples - float(e)) for c, e in zip(counts, exact))
    return IncrementReport(float(tv), exact, [int(c) for c in counts], samples)


@dataclass
class IndependenceReport:
    discrepancy: float  # max over cell pairs of |joint - product of marginals|
    precondition_met: bool  # pairs differ as sets and neither pair is degenerate
    samples: int


def independence_check(law: ProcessLaw, pair1, pair2, depth: int, samples: int,
                       seed: int = 0) -> IndependenceReport:
    """Empirical dependence of two increments on depth-``depth`` cells."""
    _check_depth(law, depth)
    p = law.prime
    n = p**depth
    t1, t2 = (Fraction(x) for x in pair1)
    t3, t4 = (Fraction(x) for x in pair2)
    ok = t1 != t2 and t3 != t4 and {t1, t2} != {t3, t4}
    digits = _draw_digits(p, seed, 2, (samples, depth, law.M + 1))
    a = _increment_samples(law, _increment_coefficients(law, t2, t1, depth), depth, digits)
    b = _increment_samples(law, _increment_coefficients(law, t4, t3, depth), depth, digits)
    joint = np.bincount(a * n + b, minlength=n * n).reshape(n, n) / samples
    prod = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    return IndependenceReport(float(np.abs(joint - prod).max()), ok, samples)


# stochastic integral ---------------------------------------------------------------

def _as_field(path) -> CnFunction:
    if isinstance(path, ProcessPath):
        return path.field
    if isinstance(path, MahlerSeries):
        return CnFunction.mahler(path)
    if isinstance(path, CnFunction):
        return path
    raise TypeError("expected a ProcessPath, MahlerSeries or CnFunction")


def _operator_norm_bound(E, domain: Ball, p: int, norm_bound) -> Fraction:
    if norm_bound is not None:
        return Fraction(norm_bound)
    if isinstance(E, Polynomial):
        return E.sup_norm(domain)
    if isinstance(E, CnFunction) and E.c0_bound is not None:
        return E.c0_bound
    if not callable(E):
        return padic_abs(E, p) if not isinstance(E, np.ndarray) else max(padic_abs(x, p) for x in E.reshape(-1))
    raise ValueError("callable integrands need a norm bound")


def stochastic_integral(E, path, t, terms: int | None = None, norm_bound=None,
                        dim: int = 1) -> AntiderivativeResult:
    """``sum_n E(t_n) (w(t_{n+1}) - w(t_n))`` along ``t_n = sigma_n(t)``.

    ``E`` is a constant, a Polynomial, or a callable ``v -> scalar or (dim, dim)
    matrix``; a callable needs ``norm_bound``. Dependence on the path is
    expressed by closing over it.
    """
    w = _as_field(path)
    domain = w.domain
    p = domain.prime
    aoi = ApproximationOfIdentity(domain)
    bound = _operator_norm_bound(E, domain, p, norm_bound)
    rule = E if callable(E) else (lambda v, c=E: c)
    kernel = MultilinearKernel(0, 1, lambda v, _xi: rule(v), dim=dim, norm_bound=bound)
    t = _point(t, p, _default_precision(path), domain)
    return antiderive_multilinear(kernel, [w], aoi, t, terms)


def _default_precision(path) -> int:
    return path.law.precision if isinstance(path, ProcessPath) else 20


def combine_paths(a, w, b, y) -> MahlerSeries:
    """Mahler series of ``a w + b y``."""
    sw, sy = _series(w), _series(y)
    n = max(len(sw.coefficients), len(sy.coefficients))
    cw = list(sw.coefficients) + [0] * (n - len(sw.coefficients))
    cy = list(sy.coefficients) + [0] * (n - len(sy.coefficients))
    return MahlerSeries(tuple(x * a + z * b for x, z in zip(cw, cy)), sw.domain)


def _series(path) -> MahlerSeries:
    if isinstance(path, ProcessPath):
        return path.series
    if isinstance(path, MahlerSeries):
        return path
    raise TypeError("expected a ProcessPath or MahlerSeries")


@dataclass
class BilinearityReport:
    integrand_residual: Fraction  # |I(aE + bV, w) - a I(E, w) - b I(V, w)|
    path_residual: Fraction  # |I(E, aw + by) - a I(E, w) - b I(E, y)|
    bound: Fraction  # combined tail bounds and precision floors

    @property
    def holds(self) -> bool:
        return self.integrand_residual <= self.bound and self.path_residual <= self.bound


def bilinearity_check(E, V, w, y, a, b, t, terms: int | None = None,
                      bounds: tuple | None = None) -> BilinearityReport:
    p = _series(w).domain.prime
    nE, nV = bounds if bounds is not None else (None, None)
    rE = E if callable(E) else (lambda v, c=E: c)
    rV = V if callable(V) else (lambda v, c=V: c)
    dom = _series(w).domain
    bE = _operator_norm_bound(E, dom, p, nE)
    bV = _operator_norm_bound(V, dom, p, nV)
    mix = lambda v: rE(v) * a + rV(v) * b
    bmix = max(padic_abs(a, p) * bE, padic_abs(b, p) * bV)
    IEw = stochastic_integral(E, w, t, terms, bE)
    IVw = stochastic_integral(V, w, t, terms, bV)
    Imix = stochastic_integral(mix, w, t, terms, bmix)
    IEy = stochastic_integral(E, y, t, terms, bE)
    Icomb = stochastic_integral(E, combine_paths(a, w, b, y), t, terms, bE)
    r1 = (Imix.scalar - (IEw.scalar * a + IVw.scalar * b)).norm()
    r2 = (Icomb.scalar - (IEw.scalar * a + IEy.scalar * b)).norm()
    scale = max(padic_abs(a, p), padic_abs(b, p), Fraction(1))
    bound = scale * max(r.error_bound() for r in (IEw, IVw, Imix, IEy, Icomb))
    return BilinearityReport(r1, r2, bound)


# polynomials in (u, x) ---------------------------------------------------------------

class JointPolynomial:
    """``f(u, x) = sum c[i, j] u**i x**j``."""

    def __init__(self, coefficients: Mapping, prime: int):
        self.coefficients = {(int(i), int(j)): c for (i, j), c in coefficients.items()
                             if not (isinstance(c, PadicNumber) and c.is_zero()) and not
                             (not isinstance(c, PadicNumber) and Fraction(c) == 0)}
        self.prime = prime

    @classmethod
    def in_x(cls, h: Polynomial) -> "JointPolynomial":
        return cls({(0, j): c for j, c in enumerate(h.coefficients)}, h.prime)

    @classmethod
    def in_u(cls, g: Polynomial) -> "JointPolynomial":
        return cls({(i, 0): c for i, c in enumerate(g.coefficients)}, g.prime)

    def __add__(self, other: "JointPolynomial") -> "JointPolynomial":
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            out[k] = out[k] + c if k in out else c
        return JointPolynomial(out, self.prime)

    def __call__(self, u, x):
        total = 0
        for (i, j), c in self.coefficients.items():
            total = total + c * _pow(u, i) * _pow(x, j)
        return total

    def partial(self, b: int, m: int) -> "JointPolynomial":
        """``d^(b+m) f / du^b dx^m``."""
        out = {}
        for (i, j), c in self.coefficients.items():
            if i >= b and j >= m:
                out[(i - b, j - m)] = c * (math.perm(i, b) * math.perm(j, m))
        return JointPolynomial(out, self.prime)

    @property
    def degree_u(self) -> int:
        return max((i for i, _ in self.coefficients), default=0)

    @property
    def degree_x(self) -> int:
        return max((j for _, j in self.coefficients), default=0)

    def is_separable(self) -> bool:
        """No monomial mixes ``u`` and ``x``."""
        return all(i == 0 or j == 0 for i, j in self.coefficients)

    def bound(self, U: Fraction, X: Fraction) -> Fraction:
        """Upper bound of ``|f(u, x)|`` for ``|u| <= U`` and ``|x| <= X``."""
        p = self.prime
        return max((padic_abs(c, p) * U**i * X**j for (i, j), c in self.coefficients.items()),
                   default=Fraction(0))


def _pow(x, k: int):
    return 1 if k == 0 else x**k


# the driven state ----------------------------------------------------------------

def _as_polynomial(f, p: int) -> Polynomial:
    if isinstance(f, Polynomial):
        return f
    return Polynomial([f], p)


class DrivenState:
    """``xi`` at sigma-nodes from ``xi_{n+1} = xi_n + a(t_n) dt_n + E(t_n) dw_n``.

    Called at a point ``s`` it runs the recursion along the nodes of ``s``;
    node values are shared between points through a cache keyed by the
    truncation integer.
    """

    def __init__(self, a: Polynomial, E: Polynomial, xi0: PadicNumber, w: CnFunction,
                 aoi: ApproximationOfIdentity, absprec: int):
        self.a, self.E, self.xi0, self.w, self.aoi = a, E, xi0, w, aoi
        self.absprec = absprec
        self._cache: dict[int, PadicNumber] = {0: xi0}
        R = aoi.domain.radius
        U = max(R, aoi.t0.norm())
        self.bound = max(xi0.norm(), a.sup_norm(aoi.domain) * R,
                         E.sup_norm(aoi.domain) * (w.c0_bound if w.c0_bound is not None else U))
        self.bound_u = U

    def node(self, j: int) -> PadicNumber:
        return self.aoi.domain.denormalize(j, absprec=self.absprec)

    def at_index(self, j: int) -> PadicNumber:
        if j in self._cache:
            return self._cache[j]
        p = self.aoi.prime
        # previous node: drop the leading base-p digit
        prev = j % p ** (floor_log(j, p))
        x0, x1 = self.node(prev), self.node(j)
        val = self.at_index(prev) + self.a(x0) * (x1 - x0) + self.E(x0) * (self.w(x1) - self.w(x0))
        self._cache[j] = val
        return val

    def __call__(self, s: PadicNumber) -> PadicNumber:
        u = self.aoi.normalized(s)
        j = u.residue(min(u.absolute_precision, self.absprec))
        return self.at_index(j)

    @property
    def field(self) -> CnFunction:
        return CnFunction(self, 0, self.aoi.domain, c0_bound=self.bound)


# Ito identities -------------------------------------------------------------------

def required_precision_uplift(order: int, p: int, path_terms: int = 1) -> int:
    """Digits lost to the ``1/k!`` weights (``k <= order``) and to Mahler evaluation."""
    return int_valuation(math.factorial(max(order, 1)), p) + floor_log(max(path_terms, 1), p)


@dataclass
class ItoTerm:
    label: str
    coefficient: Fraction
    value: PadicNumber
    tail: Fraction
    valuation_ok: bool


@dataclass
class ItoReport:
    identity: str
    lhs: PadicNumber
    rhs: PadicNumber
    terms: list
    residual: Fraction
    series_tail: Fraction
    taylor_bound: Fraction
    precision_floor: Fraction
    precision: int
    uplift: int
    terms_used: int

    @property
    def tail_bound(self) -> Fraction:
        return max(self.series_tail, self.taylor_bound, self.precision_floor)

    @property
    def holds(self) -> bool:
        return self.residual <= self.tail_bound and all(t.valuation_ok for t in self.terms)

    def to_json(self) -> dict:
        return {"identity": self.identity, "lhs": self.lhs.canonical(), "rhs": self.rhs.canonical(),
                "residual": str(self.residual), "tail_bound": str(self.tail_bound),
                "series_tail": str(self.series_tail), "taylor_bound": str(self.taylor_bound),
                "precision_floor": str(self.precision_floor), "precision": self.precision,
                "uplift": self.uplift, "terms_used": self.terms_used, "holds": self.holds,
                "terms": [{"label": t.label, "coefficient": str(t.coefficient),
                           "value": t.value.canonical(), "tail": str(t.tail)} for t in self.terms]}


class UnsupportedShape(ValueError):
    """The function is outside the class handled by the requested identity."""


class _Setup:
    """Shared state of one verification: uplifted path, point, nodes and fields."""

    def __init__(self, path: ProcessPath, t, xi0, a, E, precision: int | None, order: int,
                 terms: int | None):
        law = path.law
        p = law.prime
        P = law.precision if precision is None else precision
        self.uplift = required_precision_uplift(order, p, law.M)
        self.precision = P + self.uplift
        self.path = path.with_precision(self.precision)
        T = law.domain
        self.aoi = ApproximationOfIdentity(T)
        k = T.radius_exp
        lift = lambda x: x.lift() if isinstance(x, PadicNumber) else Fraction(x)
        self.t = PadicNumber.exact(lift(t), p, self.precision - k)
        self.xi0 = PadicNumber.exact(lift(xi0), p, self.precision)
        self.a = _as_polynomial(a, p)
        self.E = _as_polynomial(E, p)
        self.w = self.path.field
        self.xi = DrivenState(self.a, self.E, self.xi0, self.w, self.aoi, self.precision)
        self.ident = CnFunction.polynomial(Polynomial([0, 1], p), T)
        self.terms = terms
        self.prime = p

    def slot(self, kind: str):
        """(field, operator, operator bound) for a linear slot."""
        T = self.aoi.domain
        if kind == "I":
            return self.ident, None, Fraction(1)
        if kind == "a":
            return self.ident, self.a, self.a.sup_norm(T)
        return self.w, self.E, self.E.sup_norm(T)

    def term(self, label: str, coefficient: Fraction, deriv: Callable, deriv_bound: Fraction,
             kinds: Sequence[str]) -> ItoTerm:
        """``coefficient * P[deriv(u, xi(u)) o (slots)]`` at the verification point."""
        fields, ops, obounds = [self.xi.field], [], []
        for kind in kinds:
            f, op, b = self.slot(kind)
            fields.append(f)
            ops.append(op)
            obounds.append(b)
        shape = (1,) * (len(kinds) + 1)

        def rule(v, xi_vals):
            out = np.empty(shape, dtype=object)
            out.reshape(-1)[0] = deriv(v, xi_vals[0][0])
            return out

        kernel = MultilinearKernel(1, 1 + len(kinds), rule, operators=tuple(ops),
                                   norm_bound=deriv_bound, operator_bounds=tuple(obounds))
        res = antiderive_multilinear(kernel, fields, self.aoi, self.t, self.terms)
        raw = res.scalar
        value = raw * coefficient
        ok = True
        if not raw.is_zero() and not value.is_zero() and coefficient != 0:
            ok = value.valuation == raw.valuation + _val(coefficient, self.prime)
        self.terms_used = res.terms_used
        return ItoTerm(label, Fraction(coefficient), value, padic_abs(coefficient, self.prime) * res.tail_bound, ok)

    def report(self, identity: str, lhs: PadicNumber, base: PadicNumber, terms: list,
               taylor: Fraction = Fraction(0)) -> ItoReport:
        rhs = base
        for t in terms:
            rhs = rhs + t.value
        diff = lhs - rhs
        p = self.prime
        floor = power(p, -diff.absolute_precision)
        series_tail = max((t.tail for t in terms), default=Fraction(0))
        return ItoReport(identity, lhs, rhs, terms, diff.norm(), series_tail, taylor, floor,
                         self.precision, self.uplift, getattr(self, "terms_used", 0))


def _x_terms(setup: _Setup, deriv_of: Callable[[int], tuple[Callable, Fraction]], order: int,
             prefix: str = "") -> list[ItoTerm]:
    """The ``k = 1..order`` terms with all splits ``l`` between drift and noise slots."""
    out = []
    for k in range(1, order + 1):
        deriv, bound = deriv_of(k)
        for l in range(k + 1):
            coef = Fraction(math.comb(k, l), math.factorial(k))
            out.append(setup.term(f"{prefix}k={k},l={l}", coef, deriv, bound, ["a"] * (k - l) + ["E"] * l))
    return out


def _poly_deriv(h: Polynomial, k: int, B: Fraction) -> tuple[Callable, Fraction]:
    d = h.derivative(k)
    bound = max((padic_abs(c, h.prime) * B**i for i, c in enumerate(d.coefficients)), default=Fraction(0))
    return (lambda v, x: d(x)), bound


def _split_function(f, p: int) -> tuple[Polynomial, Polynomial | None]:
    if isinstance(f, Polynomial):
        return f, None
    if isinstance(f, tuple):
        return f
    raise UnsupportedShape("pass h or (h, g) with f(t, x) = h(x) + (P g)(t)")


def ito_verify_polynomial(f, a, E, xi0, path: ProcessPath, t, m: int | None = None,
                          precision: int | None = None, terms: int | None = None) -> ItoReport:
    """Check ``f(t, xi(t)) = f(t0, xi0) + P[g] + sum_{k<=m} (1/k!) sum_l C(k, l) P[...]``.

    ``f`` is a Polynomial ``h`` in x, or a pair ``(h, g)`` meaning
    ``f(t, x) = h(x) + (P g)(t)`` (the t-part is the antiderivative of ``g``).
    ``m`` defaults to the degree of ``h`` and must be at least it.
    """
    p = path.prime
    if isinstance(f, JointPolynomial):
        raise UnsupportedShape("mixed (t, x) dependence is handled by ito_verify_joint")
    h, g = _split_function(f, p)
    m = max(h.degree, 1) if m is None else m
    if h.degree > m:
        raise ValueError(f"the x-degree {h.degree} exceeds m = {m}: the difference quotient of order m+1 is not 0")
    s = _Setup(path, t, xi0, a, E, precision, m, terms)
    B = s.xi.bound
    terms_out, t_part = _time_part(s, g)
    terms_out += _x_terms(s, lambda k: _poly_deriv(h, k, B), m)
    lhs = h(s.xi(s.t)) + t_part
    return s.report("polynomial", lhs, h(s.xi0), terms_out)


def _time_part(s: _Setup, g: Polynomial | None) -> tuple[list, PadicNumber]:
    """The drift term ``P[g]`` and the t-part of ``f`` it equals by hypothesis."""
    if g is None:
        return [], PadicNumber.zero(s.prime, s.precision)
    dt = s.term("dt", Fraction(1), lambda v, x: g(v), g.sup_norm(s.aoi.domain), ["I"])
    return [dt], dt.value


def ito_verify_analytic(coefficients: Sequence, a, E, xi0, path: ProcessPath, t, M: int,
                        precision: int | None = None, terms: int | None = None,
                        g: Polynomial | None = None) -> ItoReport:
    """Ito identity for ``h(x) = sum_i c_i x**i`` with the Taylor order cut at ``M``.

    ``g`` adds the t-part ``(P g)(t)`` as in :func:`ito_verify_polynomial`.
    The omitted orders are bounded by ``max_{i > M} |c_i| B**i`` where ``B``
    bounds ``|xi|``; this must be smaller than the largest retained
    ``|c_i| B**i`` (decay observed), otherwise ValueError.
    """
    p = path.prime
    h = Polynomial(list(coefficients), p)
    s = _Setup(path, t, xi0, a, E, precision, M, terms)
    B = s.xi.bound
    sizes = [padic_abs(c, p) * B**i for i, c in enumerate(h.coefficients)]
    taylor = max(sizes[M + 1:], default=Fraction(0))
    kept = max(sizes[1: M + 1], default=Fraction(0))
    if taylor > 0 and taylor >= kept:
        raise ValueError("coefficient decay not observed up to M")
    terms_out, t_part = _time_part(s, g)
    terms_out += _x_terms(s, lambda k: _poly_deriv(h, k, B), M)
    lhs = h(s.xi(s.t)) + t_part
    return s.report("analytic", lhs, h(s.xi0), terms_out, taylor)


def ito_verify_joint(f: JointPolynomial, a, E, xi0, path: ProcessPath, t,
                     precision: int | None = None, terms: int | None = None) -> ItoReport:
    """Full double sum over ``(b, m)`` with weights ``C(m+b, m) C(m, l) / (m+b)!``."""
    p = path.prime
    D = f.degree_u + f.degree_x
    s = _Setup(path, t, xi0, a, E, precision, D, terms)
    U, B = s.xi.bound_u, s.xi.bound
    terms_out = []
    for total in range(1, D + 1):
        for mm in range(total + 1):
            b = total - mm
            d = f.partial(b, mm)
            if not d.coefficients:
                continue
            bound = d.bound(U, B)
            for l in range(mm + 1):
                coef = Fraction(math.comb(total, mm) * math.comb(mm, l), math.factorial(total))
                terms_out.append(s.term(f"b={b},m={mm},l={l}", coef, lambda v, x, d=d: d(v, x), bound,
                                        ["I"] * b + ["a"] * (mm - l) + ["E"] * l))
    lhs = f(s.t, s.xi(s.t))
    base = f(s.aoi.t0, s.xi0)
    if not isinstance(base, PadicNumber):
        base = PadicNumber.exact(base, p, s.precision)
    if not isinstance(lhs, PadicNumber):
        lhs = PadicNumber.exact(lhs, p, s.precision)
    return s.report("joint", lhs, base, terms_out)


@dataclass
class CrossCheck:
    reports: dict
    disagreement: Fraction
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.disagreement <= self.bound and all(r.holds for r in self.reports.values())


def ito_cross_check(h: Polynomial, c, a, E, xi0, path: ProcessPath, t,
                    precision: int | None = None) -> CrossCheck:
    """The three identities on ``f(t, x) = h(x) + c t``, which satisfies all their hypotheses.

    ``c t`` is the antiderivative of the constant ``c`` exactly, so the
    right-hand sides must agree within the combined tail bounds.
    """
    p = h.prime
    g = Polynomial([c], p)
    poly = ito_verify_polynomial((h, g), a, E, xi0, path, t, precision=precision)
    ana = ito_verify_analytic(h.coefficients, a, E, xi0, path, t, max(h.degree, 1), precision=precision, g=g)
    joint = JointPolynomial.in_x(h) + JointPolynomial({(1, 0): c}, p)
    joint_rep = ito_verify_joint(joint, a, E, xi0, path, t, precision=precision)
    vals = [poly.rhs, ana.rhs, joint_rep.rhs]
    dis = max((x - y).norm() for x in vals for y in vals)
    bound = max(r.tail_bound for r in (poly, ana, joint_rep))
    return CrossCheck({"polynomial": poly, "analytic": ana, "joint": joint_rep}, dis, bound)
