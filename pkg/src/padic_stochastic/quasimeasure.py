"""Transition measures on a finite-resolution ball and their cylinder quasimeasures.

States live in a ball X = B(0, p**k) cut into ``p**d`` cells; cell ``i``
holds the points whose normalized coordinate ``u = x p**k`` is ``i`` mod
``p**d``, so translating a set by a cell is index arithmetic mod ``p**d``.
Weights are exact complex rationals; all sums over cells are exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .cyclotomic import ONE, ZERO, ComplexRational, CyclotomicSum
from .padic import Ball, PadicNumber, fractional_part, int_valuation


def _time(t, p: int, prec: int = 40) -> PadicNumber:
    if isinstance(t, PadicNumber):
        return t
    return PadicNumber.exact(t, p, prec)


def _key(t: PadicNumber) -> str:
    return t.canonical()


# measures ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LocallyConstantMeasure:
    """Complex measure on the cells of ``base`` at ``depth``; uniform inside each cell."""

    base: Ball
    depth: int
    weights: tuple

    def __post_init__(self):
        if len(self.weights) != self.size:
            raise ValueError(f"need {self.size} weights")
        object.__setattr__(self, "weights", tuple(ComplexRational.of(w) for w in self.weights))

    @property
    def prime(self) -> int:
        return self.base.prime

    @property
    def size(self) -> int:
        return self.base.prime**self.depth

    @classmethod
    def delta(cls, base: Ball, depth: int, cell: int = 0) -> "LocallyConstantMeasure":
        w = [ZERO] * base.prime**depth
        w[cell] = ONE
        return cls(base, depth, tuple(w))

    @classmethod
    def uniform(cls, base: Ball, depth: int) -> "LocallyConstantMeasure":
        n = base.prime**depth
        return cls(base, depth, tuple(ComplexRational(Fraction(1, n)) for _ in range(n)))

    def total_mass(self) -> ComplexRational:
        return sum(self.weights, ZERO)

    @property
    def normalized(self) -> bool:
        return self.total_mass() == ONE

    def is_nonnegative(self) -> bool:
        return all(w.im == 0 and w.re >= 0 for w in self.weights)

    def variation(self) -> Fraction:
        """Total mass of the four nonnegative parts of the weights."""
        return sum((w.l1() for w in self.weights), Fraction(0))

    def mass(self, cells: Iterable[int]) -> ComplexRational:
        return sum((self.weights[i] for i in cells), ZERO)

    def shift(self, j: int) -> "LocallyConstantMeasure":
        """Image under translation by cell ``j``."""
        n = self.size
        return LocallyConstantMeasure(self.base, self.depth,
                                      tuple(self.weights[(i - j) % n] for i in range(n)))

    def convolve(self, other: "LocallyConstantMeasure") -> "LocallyConstantMeasure":
        _check_compatible(self, other)
        n = self.size
        out = [ZERO] * n
        for a, wa in enumerate(self.weights):
            if wa.is_zero():
                continue
            for b, wb in enumerate(other.weights):
                if not wb.is_zero():
                    out[(a + b) % n] = out[(a + b) % n] + wa * wb
        return LocallyConstantMeasure(self.base, self.depth, tuple(out))

    def refine(self, depth: int) -> "LocallyConstantMeasure":
        """Same measure on a finer partition (each cell split evenly)."""
        if depth < self.depth:
            raise ValueError("can only refine")
        n, m = self.size, self.prime ** (depth - self.depth)
        out = [self.weights[i % n] * Fraction(1, m) for i in range(n * m)]
        return LocallyConstantMeasure(self.base, depth, tuple(out))


def _check_compatible(a: LocallyConstantMeasure, b: LocallyConstantMeasure) -> None:
    if a.depth != b.depth or a.base.radius_exp != b.base.radius_exp or a.prime != b.prime:
        raise ValueError("measures live on different partitions")
    if not a.base.center.is_zero():
        raise ValueError("translations need a ball centered at 0")


def homogeneous_iterate(P1: LocallyConstantMeasure, m: int) -> LocallyConstantMeasure:
    """``m``-fold convolution power; ``m = 0`` gives the point mass at 0."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    result = LocallyConstantMeasure.delta(P1.base, P1.depth)
    base = P1
    while m:
        if m & 1:
            result = result.convolve(base)
        m >>= 1
        if m:
            base = base.convolve(base)
    return result


# kernels -----------------------------------------------------------------------

class TransitionKernel:
    """``(t1, cell i, t2) -> LocallyConstantMeasure`` on a fixed partition."""

    normalized = True
    homogeneous = False

    def __init__(self, base: Ball, depth: int):
        self.base = base
        self.depth = depth
        self._cache: dict = {}

    @property
    def prime(self) -> int:
        return self.base.prime

    @property
    def size(self) -> int:
        return self.prime**self.depth

    def weights(self, t1, i: int, t2) -> tuple:
        t1, t2 = _time(t1, self.prime), _time(t2, self.prime)
        if (t1 - t2).is_zero():
            raise ValueError("transition times must differ")
        key = (_key(t1), i, _key(t2))
        if key not in self._cache:
            self._cache[key] = tuple(ComplexRational.of(w) for w in self._weights(t1, i, t2))
        return self._cache[key]

    def measure(self, t1, i: int, t2) -> LocallyConstantMeasure:
        return LocallyConstantMeasure(self.base, self.depth, self.weights(t1, i, t2))

    def _weights(self, t1: PadicNumber, i: int, t2: PadicNumber) -> Sequence:
        raise NotImplementedError


class DeltaKernel(TransitionKernel):
    """The state stays in its cell."""

    homogeneous = True

    def _weights(self, t1, i, t2):
        w = [ZERO] * self.size
        w[i] = ONE
        return w


class HaarBallKernel(TransitionKernel):
    """Uniform measure on ``B(x, |t2 - t1|)``.

    The radius is clipped to the state ball, and a ball smaller than a cell
    is resolved as the cell itself.
    """

    homogeneous = True

    def fixed_digits(self, t1: PadicNumber, t2: PadicNumber) -> int:
        """Number of leading cell digits shared by every reachable state."""
        dt = t2 - t1
        g = dt.valuation + self.base.radius_exp
        return int(min(max(g, 0), self.depth))

    def _weights(self, t1, i, t2):
        g = self.fixed_digits(t1, t2)
        p, d = self.prime, self.depth
        mod = p**g
        mass = ComplexRational(Fraction(1, p ** (d - g)))
        return [mass if j % mod == i % mod else ZERO for j in range(p**d)]


class WeightedKernel(TransitionKernel):
    """Time-independent, translation-invariant kernel from a weight table.

    ``table[c]`` is the weight of moving by cell offset ``c``. It is a
    transition measure only when the table is idempotent under convolution;
    :func:`validate_kernel` reports this.
    """

    homogeneous = True

    def __init__(self, base: Ball, depth: int, table: Sequence):
        super().__init__(base, depth)
        self.table = LocallyConstantMeasure(base, depth, tuple(table))
        self.normalized = self.table.normalized

    def _weights(self, t1, i, t2):
        return self.table.shift(i).weights


class HomogeneousKernel(TransitionKernel):
    """``P(t1, x, t2, A) = P(t2 - t1, A - x)`` with ``P(t) = P(1)^{*(t mod period)}``.

    ``period`` is a power of ``p`` with ``P(1)^{*period}`` the point mass at 0,
    so ``t -> P(t)`` is defined and continuous on Z_p and satisfies the
    semigroup law exactly.
    """

    homogeneous = True

    def __init__(self, step: LocallyConstantMeasure, period: int):
        super().__init__(step.base, step.depth)
        self.step = step
        self.period = period
        if homogeneous_iterate(step, period).weights != LocallyConstantMeasure.delta(step.base, step.depth).weights:
            raise ValueError("step measure does not return to the point mass after `period` steps")
        self.normalized = step.normalized
        self._powers = [homogeneous_iterate(step, m) for m in range(period)]

    def _weights(self, t1, i, t2):
        dt = t2 - t1
        if dt.valuation < 0:
            raise ValueError("time differences must lie in Z_p")
        m = dt.residue(int_valuation(self.period, self.prime))
        return self._powers[m].shift(i).weights


# validation ----------------------------------------------------------------------

@dataclass
class KernelReport:
    normalization_failures: list = field(default_factory=list)
    additivity_ok: bool = True
    max_ck_residual: Fraction = Fraction(0)
    ck_failures: list = field(default_factory=list)  # (t1, s, t2) triples as canonical strings
    triples_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.normalization_failures and self.additivity_ok and not self.ck_failures


def _compose_row(P: TransitionKernel, t1, i, s, t2) -> list:
    out = [ZERO] * P.size
    for y, wy in enumerate(P.weights(t1, i, s)):
        if wy.is_zero():
            continue
        for a, wa in enumerate(P.weights(s, y, t2)):
            if not wa.is_zero():
                out[a] = out[a] + wy * wa
    return out


def validate_kernel(P: TransitionKernel, times: Sequence, ordered: bool = True) -> KernelReport:
    """Check additivity, normalization and Chapman-Kolmogorov on all cells.

    With ``ordered`` the sequence order of ``times`` is the time order and
    Chapman-Kolmogorov is tested on every triple ``t1 < s < t2`` of it;
    otherwise on every arrangement of three distinct times. The residual of a
    triple is the largest ``|re| + |im|`` of the difference over all start
    and target cells.
    """
    p = P.prime
    times = [_time(t, p) for t in times]
    rep = KernelReport()
    for t1, t2 in itertools.permutations(times, 2):
        for i in range(P.size):
            m = P.measure(t1, i, t2)
            if not m.normalized:
                rep.normalization_failures.append((_key(t1), i, _key(t2)))
            # cell masses must add up over every coarser ball
            for depth in range(P.depth):
                mod = P.prime**depth
                coarse = sum((m.mass(range(r, P.size, mod)) for r in range(mod)), ZERO)
                if coarse != m.total_mass():
                    rep.additivity_ok = False
    triples = itertools.combinations(times, 3) if ordered else itertools.permutations(times, 3)
    for t1, s, t2 in triples:
        rep.triples_checked += 1
        worst = Fraction(0)
        for i in range(P.size):
            lhs = P.weights(t1, i, t2)
            rhs = _compose_row(P, t1, i, s, t2)
            worst = max([worst] + [(a - b).l1() for a, b in zip(lhs, rhs)])
        rep.max_ck_residual = max(rep.max_ck_residual, worst)
        if worst:
            rep.ck_failures.append((_key(t1), _key(s), _key(t2)))
    return rep


# cylinder measures ---------------------------------------------------------------

def _markov_sum(P: TransitionKernel, times: Sequence, x0: int,
                allowed: Callable[[int, int, int], bool] | None = None,
                events: Sequence | None = None) -> ComplexRational:
    """``sum over cell paths`` of the product of transition weights.

    ``events[k]`` restricts the state at ``times[k+1]`` (None = everything);
    ``allowed(k, x, y)`` restricts the step from slot ``k`` to ``k+1``.
    """
    p = P.prime
    times = [_time(t, p) for t in times]
    for a, b in itertools.combinations(times, 2):
        if (a - b).is_zero():
            raise ValueError("times must be pairwise distinct")
    n = P.size
    if not 0 <= x0 < n:
        raise ValueError("anchor cell outside the partition")
    state = {x0: ONE}
    for k in range(len(times) - 1):
        ev = None if events is None or events[k] is None else set(events[k])
        if ev is not None and any(not 0 <= c < n for c in ev):
            raise ValueError("event cell outside the partition")
        nxt: dict[int, ComplexRational] = {}
        for x, wx in state.items():
            for y, w in enumerate(P.weights(times[k], x, times[k + 1])):
                if w.is_zero() or (ev is not None and y not in ev):
                    continue
                if allowed is not None and not allowed(k, x, y):
                    continue
                nxt[y] = nxt.get(y, ZERO) + wx * w
        state = nxt
    return sum(state.values(), ZERO)


@dataclass(frozen=True)
class CylinderSpec:
    """Times ``(t0, ..., t_{n+1})``, anchor cell at ``t0`` and one cell set per later time."""

    times: tuple
    anchor: int
    event: tuple  # per later time: iterable of cells or None for the whole space


def cylinder_measure(P: TransitionKernel, spec: CylinderSpec) -> ComplexRational:
    if len(spec.event) != len(spec.times) - 1:
        raise ValueError("one event slot per time after t0")
    return _markov_sum(P, spec.times, spec.anchor, events=spec.event)


def marginal_consistency(P: TransitionKernel, q: Sequence, v: Sequence, event: Sequence,
                         anchor: int) -> tuple[ComplexRational, ComplexRational]:
    """``mu^q`` of the event lifted from ``v`` versus ``mu^v`` of the event.

    ``v`` must be a subsequence of ``q`` sharing its first time.
    """
    p = P.prime
    q = [_time(t, p) for t in q]
    v = [_time(t, p) for t in v]
    keys_q = [_key(t) for t in q]
    keys_v = [_key(t) for t in v]
    if keys_v[0] != keys_q[0]:
        raise ValueError("v must share the anchor time of q")
    pos = 0
    idx = []
    for kv in keys_v:
        while pos < len(keys_q) and keys_q[pos] != kv:
            pos += 1
        if pos == len(keys_q):
            raise ValueError("v is not a subsequence of q")
        idx.append(pos)
        pos += 1
    lifted = [None] * (len(q) - 1)
    for slot, j in enumerate(idx[1:]):
        lifted[j - 1] = event[slot]
    return (cylinder_measure(P, CylinderSpec(tuple(q), anchor, tuple(lifted))),
            cylinder_measure(P, CylinderSpec(tuple(v), anchor, tuple(event))))


@dataclass
class VariationBound:
    step_variations: list  # exact sup over start cells of ||nu||, per step
    C: float

    @property
    def bound(self) -> Fraction:
        """``prod_k sup ||nu_k||`` which bounds ``|mu^q(E)|``; ``exp(C)`` in exact form."""
        return math.prod(self.step_variations, start=Fraction(1))


def variation_bound(P: TransitionKernel, q: Sequence) -> VariationBound:
    """``C = sum_k ln(sup_x ||nu_{x, t_{k-1}, t_k}||)`` over the cells."""
    p = P.prime
    q = [_time(t, p) for t in q]
    steps = []
    for a, b in zip(q, q[1:]):
        steps.append(max(P.measure(a, i, b).variation() for i in range(P.size)))
    C = sum(math.log(s) for s in steps if s != 1)
    return VariationBound(steps, float(C))


@dataclass
class WitnessLevel:
    steps: int
    mass: ComplexRational
    lower_bound: Fraction


def unbounded_variation_witness(P: TransitionKernel, boost: Iterable[int], levels: int = 4,
                                anchor: int = 0) -> list[WitnessLevel]:
    """Nested-set construction for kernels whose steps carry mass above 1.

    ``boost`` is a set of cell offsets ``delta`` with ``P(t, x, t+1, x + delta)``
    real and larger than 1. Level ``L`` uses the times ``0, 1, ..., 2**L`` and
    the event Gamma of paths whose every step lands in ``x + delta``; its
    measure is compared with ``prod_k (1 + eps_k)``.
    """
    boost = set(boost)
    n = P.size
    out = []
    for L in range(1, levels + 1):
        times = list(range(2**L + 1))
        lower = Fraction(1)
        for a, b in zip(times, times[1:]):
            eps = min(P.measure(a, i, b).mass((i + c) % n for c in boost).re - 1 for i in range(n))
            lower *= 1 + eps
        mass = _markov_sum(P, times, anchor, allowed=lambda k, x, y: (y - x) % n in boost)
        out.append(WitnessLevel(len(times) - 1, mass, lower))
    return out


# functional integral ---------------------------------------------------------------

class NotLocallyConstant(ValueError):
    """The functional changes inside a cell of the working partition."""


def _cell_points(base: Ball, depth: int, absprec: int = 30) -> tuple[list, list]:
    """Cell centers and a second representative of each cell."""
    p = base.prime
    n = p**depth
    centers = [base.denormalize(PadicNumber.exact(i, p, absprec)) for i in range(n)]
    others = [base.denormalize(PadicNumber.exact(i + (p - 1) * n * (1 + p), p, absprec)) for i in range(n)]
    return centers, others


def functional_integral(F: Callable, P: TransitionKernel, q: Sequence, anchor: int,
                        on_cells: bool = False) -> ComplexRational:
    """``J_q(F)``: sum over cell paths of ``F(x_1..x_n)`` times the path weight.

    ``F`` receives the states at ``q[1:]``: cell indices when ``on_cells``,
    else PadicNumber points, in which case it is checked to be constant on
    every cell it is evaluated on.
    """
    p = P.prime
    times = [_time(t, p) for t in q]
    centers, others = _cell_points(P.base, P.depth)

    def value(path):
        if on_cells:
            return ComplexRational.of(F(path))
        a = ComplexRational.of(F(tuple(centers[c] for c in path)))
        b = ComplexRational.of(F(tuple(others[c] for c in path)))
        if a != b:
            raise NotLocallyConstant(f"F differs inside the cells {path}")
        return a

    layer = {(anchor,): ONE}
    for k in range(len(times) - 1):
        nxt = {}
        for path, w in layer.items():
            for y, wy in enumerate(P.weights(times[k], path[-1], times[k + 1])):
                if not wy.is_zero():
                    nxt[path + (y,)] = w * wy
        layer = nxt
    return sum((w * value(path[1:]) for path, w in layer.items()), ZERO)


@dataclass
class RefinementReport:
    values: list
    differences: list  # |J_{q_{i+1}} - J_{q_i}| as l1 of the complex difference
    cauchy: bool  # differences nonincreasing along the chain (a diagnostic, not a certificate)


def functional_integral_refined(F: Callable, P: TransitionKernel, chain: Sequence[Sequence], anchor: int,
                                on_cells: bool = False) -> RefinementReport:
    values = [functional_integral(F, P, q, anchor, on_cells) for q in chain]
    diffs = [(b - a).l1() for a, b in zip(values, values[1:])]
    cauchy = all(b <= a for a, b in zip(diffs, diffs[1:]))
    return RefinementReport(values, diffs, cauchy)


# characters ---------------------------------------------------------------------

def character_exponent(gamma, x) -> Fraction:
    """``{sum_j gamma_j x_j}_p`` in [0, 1)."""
    if isinstance(gamma, PadicNumber):
        gamma, x = [gamma], [x]
    if len(gamma) != len(x):
        raise ValueError("dimension mismatch")
    s = gamma[0] * x[0]
    for g, y in zip(gamma[1:], x[1:]):
        s = s + g * y
    return fractional_part(s)


def character_eval(gamma, x) -> tuple[Fraction, complex]:
    """Exact exponent mod 1 and its rendering ``exp(2 pi i e)``."""
    e = character_exponent(gamma, x)
    return e, complex(CyclotomicSum.root(e))


def characteristic_functional(nu: LocallyConstantMeasure, gamma: PadicNumber) -> CyclotomicSum:
    """``int chi_gamma(x) nu(dx)`` with ``nu`` uniform inside each cell.

    A cell of radius ``r`` contributes ``weight * chi(center)`` when
    ``|gamma| r <= 1`` (the character is constant on it) and 0 otherwise
    (a nontrivial character averages to 0 over a ball).
    """
    base = nu.base
    p = base.prime
    cell_exp = base.radius_exp - nu.depth
    if gamma.is_zero() or gamma.valuation >= cell_exp:
        out = CyclotomicSum()
        for i, w in enumerate(nu.weights):
            if w.is_zero():
                continue
            c = base.denormalize(PadicNumber.exact(i, p, max(gamma.precision, 1) + nu.depth + 8))
            out = out + CyclotomicSum.root(character_exponent(gamma, c), w)
        return out
    return CyclotomicSum()
