"""Antiderivation along a process: sums of a multilinear kernel over increments.

For ``t`` in a ball T with nodes ``v_n = sigma_n(t)``::

    P(t) = sum_n G(v_n; xi_1(v_n)..xi_l(v_n)) . (A_{l+1}(v_n) d xi_{l+1}, ..., A_k(v_n) d xi_k)

where ``d xi = xi(v_{n+1}) - xi(v_n)``. Vectors live in K^d; a (k-l)-linear
map is a numpy object array of shape ``(d,) * (k - l + 1)`` (output index
first) and its norm is the max of the entry norms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact import RootProduct, power_mean
from .function_spaces import (
    ApproximationOfIdentity,
    CnFunction,
    Polynomial,
    cn_norm_estimate,
    padic_abs,
)
from .padic import PadicNumber, power


def as_vector(x) -> np.ndarray:
    if isinstance(x, np.ndarray):
        return x
    if isinstance(x, (tuple, list)):
        out = np.empty(len(x), dtype=object)
        out[:] = list(x)
        return out
    out = np.empty(1, dtype=object)
    out[0] = x
    return out


def as_array(x, shape) -> np.ndarray:
    """Object array of the given shape from a nested sequence or a scalar."""
    out = np.empty(shape, dtype=object)
    if isinstance(x, np.ndarray):
        out[...] = x.reshape(shape)
    elif isinstance(x, (list, tuple)):
        flat = np.array(x, dtype=object).reshape(-1)
        out.reshape(-1)[:] = list(flat)
    else:
        out.reshape(-1)[0] = x
    return out


def apply_multilinear(tensor: np.ndarray, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Feed ``vectors`` into the trailing slots of ``tensor`` (slot order = list order)."""
    out = tensor
    for vec in reversed(vectors):
        out = np.tensordot(out, vec, axes=([out.ndim - 1], [0]))
    return out


def array_norm(a, p: int) -> Fraction:
    return max((padic_abs(x, p) for x in np.asarray(a, dtype=object).reshape(-1)), default=Fraction(0))


def _matvec(A, x: np.ndarray) -> np.ndarray:
    if A is None:
        return x
    return np.dot(A, x)


@dataclass(frozen=True)
class MultilinearKernel:
    """``v, xi_1..xi_l -> G`` producing a (k-l)-linear map on K^dim.

    ``rule(v, xi_values)`` returns an array of shape ``(dim,)*(k-l+1)`` (a
    scalar is accepted when ``dim == 1 and k - l == 1``). ``operators`` holds
    one entry per linear slot: ``None`` (identity), a constant matrix, or a
    callable ``v -> matrix``. ``norm_bound`` and ``operator_bounds`` are
    certified upper bounds of the sup norms over T along the supplied fields.
    """

    l: int
    k: int
    rule: Callable
    dim: int = 1
    operators: tuple = ()
    norm_bound: Fraction | None = None
    operator_bounds: tuple | None = None

    def __post_init__(self):
        if not 0 <= self.l < self.k:
            raise ValueError("need 0 <= l < k")
        if self.operators and len(self.operators) != self.k - self.l:
            raise ValueError("one operator per linear slot")

    @property
    def slots(self) -> int:
        return self.k - self.l

    def tensor(self, v, xi_values) -> np.ndarray:
        return as_array(self.rule(v, xi_values), (self.dim,) * (self.slots + 1))

    def operator_at(self, i: int, v):
        if not self.operators:
            return None
        A = self.operators[i]
        if A is None or not callable(A):
            return A
        return A(v)

    def operator_norms(self, p: int) -> list[Fraction]:
        if self.operator_bounds is not None:
            return list(self.operator_bounds)
        out = []
        for i in range(self.slots):
            A = self.operators[i] if self.operators else None
            if A is None:
                out.append(Fraction(1))
            elif callable(A):
                raise ValueError("operator-valued functions need declared operator_bounds")
            else:
                out.append(array_norm(A, p))
        return out

    @classmethod
    def polynomial_scalar(cls, g: Polynomial, tensor, k: int, domain, operators=()) -> "MultilinearKernel":
        """``G(v) = g(v) * tensor`` with ``l = 0``; the norm bound is exact."""
        tensor = np.asarray(tensor, dtype=object)
        dim = tensor.shape[0] if tensor.ndim else 1
        return cls(0, k, lambda v, _xi: np.asarray(tensor, dtype=object) * g(v), dim=dim,
                   operators=tuple(operators),
                   norm_bound=g.sup_norm(domain) * array_norm(tensor, g.prime))


@dataclass
class AntiderivativeResult:
    value: np.ndarray
    terms_used: int
    tail_bound: Fraction
    certified: bool = True

    @property
    def scalar(self) -> PadicNumber:
        return self.value[0]

    def error_bound(self) -> Fraction:
        """max(tail bound, p^-A) where A is the smallest absolute precision of the value."""
        floor = max(power(x.prime, -x.absolute_precision) for x in self.value)
        return max(self.tail_bound, floor)


def _norm_or_estimate(declared, fallback: Callable[[], Fraction]) -> tuple[Fraction, bool]:
    if declared is not None:
        return Fraction(declared), True
    return fallback(), False


def antiderive_multilinear(kernel: MultilinearKernel, xis: Sequence[CnFunction],
                           aoi: ApproximationOfIdentity, v: PadicNumber,
                           terms: int | None = None) -> AntiderivativeResult:
    """Truncated antiderivative at ``v`` with a bound on the omitted tail.

    ``terms`` defaults to the number of known digits of the normalized point;
    it is capped there since later nodes are not determined.
    """
    if len(xis) != kernel.k:
        raise ValueError(f"kernel needs {kernel.k} fields, got {len(xis)}")
    p = aoi.prime
    nmax = aoi.max_terms(v)
    n_terms = nmax if terms is None else min(terms, nmax)
    u = aoi.normalized(v)
    nodes = [aoi.t0]
    truncs = [0]
    for n in range(1, n_terms + 1):
        truncs.append(aoi.truncate(n, u))
        nodes.append(aoi(n, v))
    cache: dict[int, list] = {}

    def values_at(n):
        if n not in cache:
            cache[n] = [as_vector(xi(nodes[n])) for xi in xis]
        return cache[n]

    total = None
    for n in range(n_terms):
        if truncs[n + 1] == truncs[n] and n > 0:
            continue  # sigma_{n+1}(v) = sigma_n(v): every increment vanishes
        here, nxt = values_at(n), values_at(n + 1)
        incs = [_matvec(kernel.operator_at(i, nodes[n]), nxt[kernel.l + i] - here[kernel.l + i])
                for i in range(kernel.slots)]
        term = apply_multilinear(kernel.tensor(nodes[n], here[: kernel.l]), incs)
        total = term if total is None else total + term
    if total is None:
        total = as_vector([PadicNumber.zero(p, v.absolute_precision)] * kernel.dim)
    tail, certified = antiderivative_tail(kernel, xis, aoi, n_terms)
    return AntiderivativeResult(as_vector(total), n_terms, tail, certified)


def antiderivative_tail(kernel: MultilinearKernel, xis: Sequence[CnFunction],
                        aoi: ApproximationOfIdentity, n_terms: int) -> tuple[Fraction, bool]:
    """Bound of every term from index ``n_terms`` on.

    ``|d xi_n| <= ||xi||_{C^1} * R * p^-n`` since ``|sigma_{n+1} - sigma_n| <= R p^-n``.
    """
    p = aoi.prime
    R = aoi.domain.radius
    gnorm, ok = _norm_or_estimate(kernel.norm_bound, lambda: Fraction(0))
    if not ok:
        gnorm, ok = _estimate_kernel_norm(kernel, xis, aoi), False
    bound = gnorm
    for A in kernel.operator_norms(p):
        bound *= A
    step = R * power(p, -n_terms)
    for xi in xis[kernel.l:]:
        c1, c1ok = _norm_or_estimate(xi.c1_bound, lambda: cn_norm_estimate(xi, 1, 2))
        ok = ok and c1ok
        bound *= c1 * step
    return bound, ok


def _estimate_kernel_norm(kernel, xis, aoi, depth: int = 2) -> Fraction:
    from .function_spaces import grid_points
    best = Fraction(0)
    for x in grid_points(aoi.domain, depth):
        vals = [as_vector(xi(x)) for xi in xis[: kernel.l]]
        best = max(best, array_norm(kernel.tensor(x, vals), aoi.prime))
    return best


def antiderive_scalar(G: Callable, xi: CnFunction, aoi: ApproximationOfIdentity, t: PadicNumber,
                      terms: int | None = None, norm_bound: Fraction | None = None) -> AntiderivativeResult:
    """``sum_n G(v_n) (xi(v_{n+1}) - xi(v_n))`` for scalar G and xi."""
    if norm_bound is None and isinstance(G, Polynomial):
        norm_bound = G.sup_norm(aoi.domain)
    elif norm_bound is None and isinstance(G, CnFunction):
        norm_bound = G.c0_bound
    kernel = MultilinearKernel(0, 1, lambda v, _xi: G(v), norm_bound=norm_bound)
    return antiderive_multilinear(kernel, [xi], aoi, t, terms)


@dataclass
class DerivativeCheck:
    lhs: np.ndarray
    rhs: np.ndarray
    residual: Fraction


def derivative_check(kernel: MultilinearKernel, xis: Sequence[CnFunction], aoi: ApproximationOfIdentity,
                     x: PadicNumber, h: int) -> DerivativeCheck:
    """Compare the difference quotient of the antiderivative with its derivative.

    The quotient is taken with step ``zeta = p**h`` (scaled to the domain).
    With a single linear slot the derivative at ``x`` is
    ``G(x; xi_1(x)..xi_l(x)) . (A(x) xi'(x))``. With two or more linear slots
    every term is of order ``|v_{n+1} - v_n|**2`` and the derivative is 0.
    """
    p = aoi.prime
    zeta = PadicNumber.exact(power(p, h), p, x.absolute_precision) * power(p, -aoi.domain.radius_exp)
    y = x + zeta
    if not aoi.domain.contains(y):
        raise ValueError("step leaves the domain")
    fx = antiderive_multilinear(kernel, xis, aoi, x).value
    fy = antiderive_multilinear(kernel, xis, aoi, y).value
    lhs = (fy - fx) * zeta.inverse()
    if kernel.slots == 1:
        xi = xis[kernel.l]
        if xi.derivative is None:
            raise ValueError("the linear-slot field needs an exact derivative")
        vals = [as_vector(f(x)) for f in xis[: kernel.l]]
        rhs = apply_multilinear(kernel.tensor(x, vals),
                                [_matvec(kernel.operator_at(0, x), as_vector(xi.derivative(x)))])
    else:
        rhs = as_vector([PadicNumber.zero(p, x.absolute_precision)] * kernel.dim)
    return DerivativeCheck(lhs, as_vector(rhs), array_norm(lhs - rhs, p))


@dataclass
class BoundCheck:
    lhs: RootProduct
    rhs: RootProduct

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def c1_norm_of_antiderivative(kernel, xis, aoi, depth: int, order: int = 1) -> Fraction:
    """Grid lower bound of the C^order norm (order 0 or 1) of ``x -> P(x)``."""
    p = aoi.prime
    cache: dict[str, np.ndarray] = {}

    def F(x):
        key = x.canonical()
        if key not in cache:
            cache[key] = antiderive_multilinear(kernel, xis, aoi, x).value
        return tuple(cache[key])

    from .function_spaces import grid_points
    if order == 0:
        return max(padic_abs(F(x), p) for x in grid_points(aoi.domain, depth))
    return cn_norm_estimate(F, 1, depth, aoi.domain)


def c1_bound_check(kernel: MultilinearKernel, xis: Sequence[CnFunction], aoi: ApproximationOfIdentity,
                   depth: int = 2) -> BoundCheck:
    """Grid estimate of ``||P||_{C^1}`` against ``||G|| prod ||A_i|| ||xi_i||_{C^1}``."""
    lhs = c1_norm_of_antiderivative(kernel, xis, aoi, depth)
    return BoundCheck(RootProduct.of(lhs), RootProduct.of(_rhs_factor(kernel, xis, aoi.prime, "c1")))


def _rhs_factor(kernel, xis, p, which: str) -> Fraction:
    if kernel.norm_bound is None:
        raise ValueError("kernel needs a declared norm bound")
    out = Fraction(kernel.norm_bound)
    for A in kernel.operator_norms(p):
        out *= A
    for xi in xis[kernel.l:]:
        b = xi.c1_bound if which == "c1" else xi.c0_bound
        if b is None:
            raise ValueError("fields need declared norm bounds")
        out *= b
    return out


@dataclass(frozen=True)
class SimpleRandomField:
    """Finitely many events with rational probabilities, one value per event."""

    weights: tuple
    values: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.values):
            raise ValueError("one value per event")
        if any(Fraction(w) < 0 for w in self.weights) or sum(Fraction(w) for w in self.weights) != 1:
            raise ValueError("weights must form a probability vector")

    def lq_norm(self, norms: Sequence[Fraction], q) -> RootProduct:
        return power_mean(self.weights, norms, q)


def _inv(x) -> Fraction:
    return Fraction(0) if x == math.inf else Fraction(1) / Fraction(x)


def lq_bound_check(G: SimpleRandomField, xis: Sequence[SimpleRandomField], aoi: ApproximationOfIdentity,
                   r, q, s, order: int = 0, depth: int = 2) -> BoundCheck:
    """L^s norm of the antiderivative field against ``||G||_{L^r} prod ||A|| ||xi_i||_{L^q}``.

    ``G.values`` are kernels and ``xis[i].values`` fields over the same events.
    Inner norms are C^0 (``order=0``) or C^1 (``order=1``); the left side uses
    grid estimates, the right side certified bounds. With ``m = k - l`` linear
    slots the exponents must satisfy ``1/r + m/q = 1/s`` (Hoelder for a product
    of ``m + 1`` factors); for ``m = 1`` this is ``1/r + 1/q = 1/s``.
    """
    kernels = G.values
    m = kernels[0].slots
    if _inv(r) + m * _inv(q) != _inv(s):
        raise ValueError("exponents must satisfy 1/r + m/q = 1/s")
    for f in xis:
        if tuple(f.weights) != tuple(G.weights):
            raise ValueError("all fields must share the event set")
    p = aoi.prime
    which = "c1" if order == 1 else "c0"
    lhs_norms, g_norms, op_norms = [], [], None
    xi_norms = [[] for _ in xis[kernels[0].l:]]
    for j, kern in enumerate(kernels):
        fields = [f.values[j] for f in xis]
        lhs_norms.append(c1_norm_of_antiderivative(kern, fields, aoi, depth, order))
        g_norms.append(Fraction(kern.norm_bound))
        ops = kern.operator_norms(p)
        op_norms = ops if op_norms is None else [max(a, b) for a, b in zip(op_norms, ops)]
        for i, f in enumerate(fields[kern.l:]):
            xi_norms[i].append(f.c1_bound if which == "c1" else f.c0_bound)
    lhs = power_mean(G.weights, lhs_norms, s)
    rhs = power_mean(G.weights, g_norms, r)
    for a in op_norms:
        rhs = rhs * a
    for norms in xi_norms:
        rhs = rhs * power_mean(G.weights, norms, q)
    return BoundCheck(lhs, rhs)
