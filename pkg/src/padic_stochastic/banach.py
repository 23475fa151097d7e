"""Operators on finite truncations of c_0 over Q_p.

Matrices act on column vectors with the sup norm, so the operator norm is the
largest entry norm. ``nu_q`` norms are computed for explicit rank-one
representations; they are upper bounds of the infimum over all
representations, exact for diagonal operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact import PowerSum, le
from .function_spaces import padic_abs
from .padic import Ball, PadicNumber, power


class UnsupportedOperator(ValueError):
    """The operator is outside the class handled by the decomposition."""


def _obj_array(rows) -> np.ndarray:
    a = np.array(rows, dtype=object)
    if a.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    return a


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, PadicNumber) else x == 0


def _valuation(x, p: int):
    if isinstance(x, PadicNumber):
        return x.valuation
    from .padic import rational_valuation
    return rational_valuation(x, p)


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    """``entries[j, k]`` maps coordinate ``k`` of the domain to coordinate ``j``."""

    entries: np.ndarray
    prime: int

    @classmethod
    def from_rows(cls, rows, prime: int) -> "MatrixOperator":
        return cls(_obj_array(rows), prime)

    @classmethod
    def diagonal(cls, values: Sequence, prime: int) -> "MatrixOperator":
        n = len(values)
        a = np.empty((n, n), dtype=object)
        a[...] = 0
        for i, v in enumerate(values):
            a[i, i] = v
        return cls(a, prime)

    @classmethod
    def identity(cls, n: int, prime: int) -> "MatrixOperator":
        return cls.diagonal([1] * n, prime)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __matmul__(self, other):
        if isinstance(other, MatrixOperator):
            return MatrixOperator(np.dot(self.entries, other.entries), self.prime)
        return np.dot(self.entries, np.asarray(other, dtype=object))

    def __add__(self, other: "MatrixOperator") -> "MatrixOperator":
        return MatrixOperator(self.entries + other.entries, self.prime)

    def __sub__(self, other: "MatrixOperator") -> "MatrixOperator":
        return MatrixOperator(self.entries - other.entries, self.prime)

    def scale(self, c) -> "MatrixOperator":
        return MatrixOperator(self.entries * c, self.prime)

    def transpose(self) -> "MatrixOperator":
        return MatrixOperator(self.entries.T.copy(), self.prime)

    def equals(self, other: "MatrixOperator") -> bool:
        """Entrywise equality (precision-aware for p-adic entries)."""
        if self.shape != other.shape:
            return False
        return all(_is_zero(x) for x in (self.entries - other.entries).reshape(-1))

    def is_zero(self) -> bool:
        return all(_is_zero(x) for x in self.entries.reshape(-1))


def operator_norm(A: MatrixOperator) -> Fraction:
    """``sup ||Ax|| / ||x||`` for the sup norm: the largest entry norm."""
    return max((padic_abs(x, A.prime) for x in A.entries.reshape(-1)), default=Fraction(0))


def vector_norm(x, p: int) -> Fraction:
    return max((padic_abs(c, p) for c in np.asarray(x, dtype=object).reshape(-1)), default=Fraction(0))


@dataclass(frozen=True, eq=False)
class RankOneSum:
    """``x -> sum_n a_n(x) y_n`` with functionals ``a_n`` given by coordinates."""

    terms: tuple  # of (a, y) pairs of object vectors
    prime: int
    shape: tuple[int, int]

    @classmethod
    def rows_of(cls, A: MatrixOperator) -> "RankOneSum":
        """``A = sum_j e_j (row_j . x)``."""
        m, n = A.shape
        terms = []
        for j in range(m):
            e = np.zeros(m, dtype=object)
            e[j] = 1
            terms.append((A.entries[j, :].copy(), e))
        return cls(tuple(terms), A.prime, A.shape)

    @classmethod
    def columns_of(cls, A: MatrixOperator) -> "RankOneSum":
        """``A = sum_k x_k col_k``."""
        m, n = A.shape
        terms = []
        for k in range(n):
            e = np.zeros(n, dtype=object)
            e[k] = 1
            terms.append((e, A.entries[:, k].copy()))
        return cls(tuple(terms), A.prime, A.shape)

    @classmethod
    def diagonal(cls, values: Sequence, prime: int) -> "RankOneSum":
        n = len(values)
        terms = []
        for i, v in enumerate(values):
            e = np.zeros(n, dtype=object)
            e[i] = 1
            y = np.zeros(n, dtype=object)
            y[i] = v
            terms.append((e, y))
        return cls(tuple(terms), prime, (n, n))

    def to_matrix(self) -> MatrixOperator:
        m, n = self.shape
        a = np.empty((m, n), dtype=object)
        a[...] = 0
        for f, y in self.terms:
            a = a + np.outer(y, f)
        return MatrixOperator(a, self.prime)

    def __add__(self, other: "RankOneSum") -> "RankOneSum":
        return RankOneSum(self.terms + other.terms, self.prime, self.shape)

    def term_norms(self) -> list[Fraction]:
        p = self.prime
        return [vector_norm(a, p) * vector_norm(y, p) for a, y in self.terms]

    def compose_left(self, S: MatrixOperator) -> "RankOneSum":
        """Representation of ``S A``: terms ``(a_n, S y_n)``."""
        return RankOneSum(tuple((a, np.dot(S.entries, y)) for a, y in self.terms),
                          self.prime, (S.shape[0], self.shape[1]))

    def compose_right(self, T: MatrixOperator) -> "RankOneSum":
        """Representation of ``A T``: terms ``(T^* a_n, y_n)``."""
        return RankOneSum(tuple((np.dot(T.entries.T, a), y) for a, y in self.terms),
                          self.prime, (self.shape[0], T.shape[1]))


def _check_q(q) -> None:
    if q != math.inf and Fraction(q) < 1:
        raise ValueError("q must be >= 1")


def nu_q(A, q) -> PowerSum:
    """``(sum ||a_n||^q ||y_n||^q)^(1/q)`` for the given representation.

    For a :class:`MatrixOperator` the smaller of its row and column
    representations is used (both coincide for diagonal operators, where the
    value is exact). ``q = inf`` gives the operator norm. The result is an
    upper bound of the infimum over representations.
    """
    _check_q(q)
    if isinstance(A, MatrixOperator):
        if q == math.inf:
            return PowerSum((operator_norm(A),), math.inf)
        r = nu_q(RankOneSum.rows_of(A), q)
        c = nu_q(RankOneSum.columns_of(A), q)
        return r if le(r, c) else c
    if q == math.inf:
        return PowerSum((operator_norm(A.to_matrix()),), math.inf)
    return PowerSum(tuple(A.term_norms()), q)


def adjoint(T):
    """Transpose: rank-one terms ``(a_n, y_n)`` become ``(y_n^*, a_n)``."""
    if isinstance(T, MatrixOperator):
        return T.transpose()
    return RankOneSum(tuple((y, a) for a, y in T.terms), T.prime, (T.shape[1], T.shape[0]))


def _diag_values(J) -> list:
    if isinstance(J, RankOneSum):
        J = J.to_matrix()
    a = J.entries
    if any(not _is_zero(a[i, j]) for i in range(a.shape[0]) for j in range(a.shape[1]) if i != j):
        raise UnsupportedOperator("composition check needs diagonal operators")
    return [a[i, i] for i in range(a.shape[0])]


def holder_exponent(q, r):
    """``v`` with ``1/v = 1/q + 1/r``."""
    inv = lambda x: Fraction(0) if x == math.inf else 1 / Fraction(x)  # noqa: E731
    s = inv(q) + inv(r)
    if s > 1:
        raise ValueError("1/q + 1/r must not exceed 1")
    return math.inf if s == 0 else 1 / s


def compose_check(J, S, q, r) -> tuple[PowerSum, tuple[PowerSum, PowerSum]]:
    """``nu_v(JS)`` against the factors ``nu_q(J), nu_r(S)`` for commuting diagonal operators."""
    _check_q(q)
    _check_q(r)
    v = holder_exponent(q, r)
    dj, ds = _diag_values(J), _diag_values(S)
    if len(dj) != len(ds):
        raise ValueError("dimension mismatch")
    p = J.prime
    JS = [padic_abs(a, p) * padic_abs(b, p) for a, b in zip(dj, ds)]
    lhs = PowerSum(tuple(JS), v)
    return lhs, (PowerSum(tuple(padic_abs(a, p) for a in dj), q),
                 PowerSum(tuple(padic_abs(b, p) for b in ds), r))


# spectral decomposition -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``A = lam * U * sum_n p^n P_n`` for a monomial matrix ``A``."""

    scale: PadicNumber
    prime: int
    U: MatrixOperator
    projectors: tuple  # P_0, P_1, ... as MatrixOperators (possibly zero)

    def reconstruct(self) -> MatrixOperator:
        n = self.U.shape[1]
        total = np.empty((n, n), dtype=object)
        total[...] = 0
        for k, P in enumerate(self.projectors):
            total = total + P.entries * Fraction(self.prime) ** k
        return MatrixOperator(np.dot(self.U.entries, total) * self.scale, self.prime)

    def singular_numbers(self) -> list[tuple[Fraction, int]]:
        """``(s_n, rank P_n)`` with ``s_n = |lam| p^-n ||P_n||``."""
        out = []
        for k, P in enumerate(self.projectors):
            rank = sum(1 for i in range(P.shape[0]) if not _is_zero(P.entries[i, i]))
            if rank:
                out.append((self.scale.norm() * power(self.prime, -k) * operator_norm(P), rank))
        return out

    def nu_q(self, q) -> PowerSum:
        terms = []
        for s, rank in self.singular_numbers():
            terms += [s] * rank
        return PowerSum(tuple(terms), q)


def spectral_decompose(A: MatrixOperator, absprec: int | None = None) -> SpectralDecomposition:
    """Decompose a matrix with at most one nonzero entry per row and column.

    Coordinates are grouped by the valuation of their nonzero entry; ``U``
    carries the permutation and the unit parts, so it is a partial isometry.
    Other matrices raise :class:`UnsupportedOperator`.
    """
    p = A.prime
    m, n = A.shape
    if m != n:
        raise UnsupportedOperator("square matrices only")
    nz = [(i, j) for i in range(m) for j in range(n) if not _is_zero(A.entries[i, j])]
    if not nz:
        raise UnsupportedOperator("the zero operator has no decomposition with |lam| = ||A||")
    rows = [i for i, _ in nz]
    cols = [j for _, j in nz]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise UnsupportedOperator("not diagonalizable by a coordinate permutation")
    vals = {(i, j): _valuation(A.entries[i, j], p) for i, j in nz}
    vmin = min(vals.values())
    prec = absprec
    if prec is None:
        precs = [x.absolute_precision for x in A.entries.reshape(-1) if isinstance(x, PadicNumber)]
        prec = max(precs) if precs else 64
    lam = PadicNumber.exact(power(p, vmin), p, max(prec, vmin + 1))
    depth = max(vals.values()) - vmin
    U = np.empty((n, n), dtype=object)
    U[...] = 0
    projs = [np.zeros((n, n), dtype=object) for _ in range(depth + 1)]
    for (i, j), v in vals.items():
        k = v - vmin
        projs[k][j, j] = 1
        U[i, j] = A.entries[i, j] / (power(p, v))
    return SpectralDecomposition(lam, p, MatrixOperator(U, p),
                                 tuple(MatrixOperator(P, p) for P in projs))


# projection-valued measures --------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProjectionValuedMeasure:
    """Finitely many atoms with diagonal projectors on K^dim.

    Sets of the algebra are frozensets of atom indices.
    """

    atoms: tuple
    projectors: tuple  # one 0/1 diagonal MatrixOperator per atom
    prime: int

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @classmethod
    def discrete(cls, n: int, prime: int) -> "ProjectionValuedMeasure":
        projs = []
        for i in range(n):
            d = [0] * n
            d[i] = 1
            projs.append(MatrixOperator.diagonal(d, prime))
        return cls(tuple(range(n)), tuple(projs), prime)

    def everything(self) -> frozenset:
        return frozenset(range(len(self.atoms)))

    def __call__(self, A) -> MatrixOperator:
        out = MatrixOperator.diagonal([0] * self.dim, self.prime)
        for i in A:
            out = out + self.projectors[i]
        return out

    def is_null(self, A) -> bool:
        return self(A).is_zero()

    def scalar_measure(self, xi, eta) -> Callable[[frozenset], object]:
        """``A -> eta(P(A) xi)``."""
        xi = np.asarray(xi, dtype=object)
        eta = np.asarray(eta, dtype=object)
        return lambda A: np.dot(eta, np.dot(self(A).entries, xi))

    def measure_norm(self, xi, eta) -> Fraction:
        """``sup_A |mu(A)|``; on a finite algebra the ultrametric makes atoms attain it."""
        mu = self.scalar_measure(xi, eta)
        return max((padic_abs(mu(frozenset([i])), self.prime) for i in range(len(self.atoms))),
                   default=Fraction(0))


def pvm_from_partition(cells: Sequence[Ball], base: Ball, grid_depth: int) -> ProjectionValuedMeasure:
    """Multiplication projectors on functions sampled at a grid of ``base``.

    Coordinates are the ``p**grid_depth`` grid points of ``base``; the projector
    of a cell keeps the coordinates of grid points inside it. Cells finer than
    the grid may hold no grid point and are then null.
    """
    p = base.prime
    cells = list(cells)
    for a in range(len(cells)):
        if not cells[a].is_inside(base):
            raise ValueError("cell outside the base ball")
        for b in range(a + 1, len(cells)):
            if not cells[a].is_disjoint(cells[b]):
                raise ValueError("cells overlap")
    volume = sum((c.radius for c in cells), Fraction(0))
    if volume != base.radius:
        raise ValueError("cells do not cover the base ball")
    points = [base.denormalize(i) for i in range(p**grid_depth)]
    projs = []
    for c in cells:
        projs.append(MatrixOperator.diagonal([1 if c.contains(x) else 0 for x in points], p))
    return ProjectionValuedMeasure(tuple(cells), tuple(projs), p)


def spectral_integral(f, P: ProjectionValuedMeasure) -> MatrixOperator:
    """``sum_atoms f(atom) P(atom)``; ``f`` is a mapping or a sequence indexed by atom."""
    out = MatrixOperator.diagonal([0] * P.dim, P.prime)
    for i in range(len(P.atoms)):
        try:
            value = f[i]
        except (KeyError, IndexError):
            raise ValueError(f"missing value for atom {i}") from None
        out = out + P.projectors[i].scale(value)
    return out


def essential_sup(f, P: ProjectionValuedMeasure) -> Fraction:
    """``||f||_inf``: largest |f| over atoms that are not null."""
    return max((padic_abs(f[i], P.prime) for i in range(len(P.atoms))
                if not P.is_null([i])), default=Fraction(0))
