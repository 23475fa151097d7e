"""Randomized acceptance suite.

Each criterion draws its own instances from a seeded generator, checks every
contract exactly (or at the stated tolerance) and reports whether it ran
within its time budget.
"""
from __future__ import annotations

import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .antiderivation import (
    MultilinearKernel,
    SimpleRandomField,
    antiderive_multilinear,
    c1_bound_check,
    derivative_check,
    lq_bound_check,
)
from .banach import (
    MatrixOperator,
    ProjectionValuedMeasure,
    RankOneSum,
    adjoint,
    compose_check,
    essential_sup,
    nu_q,
    operator_norm,
    pvm_from_partition,
    spectral_decompose,
    spectral_integral,
)
from .cyclotomic import ComplexRational
from .exact import Product, Sum, le
from .function_spaces import ApproximationOfIdentity, CnFunction, Polynomial, axiom_violations, padic_abs
from .padic import Ball, PadicNumber, partition, power
from .quasimeasure import (
    DeltaKernel,
    HaarBallKernel,
    HomogeneousKernel,
    LocallyConstantMeasure,
    character_exponent,
    characteristic_functional,
    homogeneous_iterate,
    marginal_consistency,
    unbounded_variation_witness,
    validate_kernel,
    variation_bound,
)
from .stochastic import ProcessLaw, increment_law_check, ito_cross_check, sample_path

PRIMES = (2, 3, 5)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    elapsed: float
    budget: float
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed and self.elapsed < self.budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.elapsed:.2f}s (budget {self.budget:g}s)"

    def to_json(self) -> dict:
        # elapsed time is left out so that reports are reproducible byte for byte
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "budget": self.budget, "details": self.details}


def _timed(number: int, name: str, budget: float, body: Callable[[], tuple[bool, dict]]) -> CriterionResult:
    start = time.perf_counter()
    passed, details = body()
    return CriterionResult(number, name, passed, time.perf_counter() - start, budget, details)


def _random_padic(rng: random.Random, p: int, prec: int = 20, vmin: int = -3, vmax: int = 3) -> PadicNumber:
    v = rng.randint(vmin, vmax)
    unit = rng.randrange(1, p**prec)
    if unit % p == 0:
        unit += rng.randrange(1, p)
    return PadicNumber.exact(Fraction(unit) * power(p, v), p, prec + v)


def _random_rational(rng: random.Random, p: int, vmin: int = 0, vmax: int = 3) -> Fraction:
    """``p**v * u`` with a small integer unit ``u``."""
    u = rng.choice([x for x in range(-30, 31) if x % p])
    return Fraction(u) * power(p, rng.randint(vmin, vmax))


# 1 ---------------------------------------------------------------------------------

def criterion_ultrametric(seed: int = 0, triples: int = 10_000) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        failures = {}
        for p in PRIMES:
            bad = 0
            for _ in range(triples):
                x, y, z = (_random_padic(rng, p) for _ in range(3))
                if rng.random() < 0.3:  # force equal valuations to exercise cancellation
                    y = x + _random_padic(rng, p, vmin=int(x.valuation), vmax=int(x.valuation) + 4)
                for a, b in ((x, y), (y, z), (x, z)):
                    na, nb, ns = a.norm(), b.norm(), (a + b).norm()
                    if ns > max(na, nb) or (na != nb and ns != max(na, nb)):
                        bad += 1
                if (x - z).norm() > max((x - y).norm(), (y - z).norm()):
                    bad += 1
            failures[p] = bad
        return all(v == 0 for v in failures.values()), {"failures": failures, "triples_per_prime": triples}
    return _timed(1, "ultrametric axioms", 5, body)


# 2 ---------------------------------------------------------------------------------

def criterion_identity_approximation(seed: int = 0, points: int = 1000, n_max: int = 12) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        report = {}
        for p in PRIMES:
            k = rng.randint(-2, 2)
            center = PadicNumber.exact(rng.randrange(p**6), p, 24) * power(p, -k)
            T = Ball(center, k)
            us = [rng.randrange(p**20)]
            while len(us) < points:
                # alternate far jumps with close neighbours so (iii) is exercised
                if rng.random() < 0.5:
                    us.append(rng.randrange(p**20))
                else:
                    us.append((us[-1] + rng.randrange(1, p) * p ** rng.randint(0, 19)) % p**20)
            xs = [T.denormalize(u, absprec=20) for u in us]
            report[p] = axiom_violations(ApproximationOfIdentity(T), xs, n_max)
        ok = all(v == 0 for r in report.values() for v in r.values())
        return ok, {"violations": report, "points_per_prime": points, "n_max": n_max}
    return _timed(2, "approximation of the identity", 5, body)


# 3 ---------------------------------------------------------------------------------

def _unit_kernel() -> MultilinearKernel:
    return MultilinearKernel(0, 1, lambda v, _xi: 1, norm_bound=Fraction(1))


def criterion_antiderivation(seed: int = 0, points: int = 1000, probes: int = 20) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        tele_fail = 0
        decay = {}
        ok = True
        for idx, p in enumerate(PRIMES):
            T = Ball(PadicNumber.exact(rng.randrange(p**4), p, 30), 0)
            aoi = ApproximationOfIdentity(T)
            ident = CnFunction.polynomial(Polynomial([0, 1], p), T)
            share = points // len(PRIMES) + (1 if idx < points % len(PRIMES) else 0)
            for _ in range(share):
                t = T.denormalize(rng.randrange(p**20), absprec=20)
                res = antiderive_multilinear(_unit_kernel(), [ident], aoi, t)
                if not res.scalar == t - T.center:
                    tele_fail += 1
            g = Polynomial([1, 1, 1], p)
            xi = CnFunction.polynomial(Polynomial([0, 1, 0, 1], p), T)
            kern = MultilinearKernel.polynomial_scalar(g, [1], 1, T)
            xs = [T.denormalize(rng.randrange(p**24), absprec=24) for _ in range(probes)]
            res = [max(derivative_check(kern, [xi], aoi, x, h).residual for x in xs) for h in (4, 6, 8)]
            decay[p] = [str(r) for r in res]
            # at least a factor p per unit of h
            ok = ok and all(b * p**2 <= a for a, b in zip(res, res[1:]))
        ok = ok and tele_fail == 0
        return ok, {"telescoping_failures": tele_fail, "points": points,
                    "derivative_residuals_h4_h6_h8": decay}
    return _timed(3, "antiderivation telescoping and derivative", 30, body)


# 4 ---------------------------------------------------------------------------------

_EXPONENTS = [(2, 2, 1), (math.inf, 1, 1), (1, math.inf, 1), (math.inf, math.inf, math.inf),
              (4, 4, 2), (3, 6, 2)]


def _random_poly(rng, p, deg, vmin=0, vmax=2) -> Polynomial:
    return Polynomial([_random_rational(rng, p, vmin, vmax) for _ in range(deg + 1)], p)


def _random_instance(rng, p, T, slots=1):
    g = _random_poly(rng, p, rng.randint(0, 2), -1, 2)
    tensor = np.empty((1,) * (slots + 1), dtype=object)
    tensor.reshape(-1)[0] = 1
    ops = [rng.choice([None, _random_rational(rng, p, -1, 2)]) for _ in range(slots)]
    ops = [None if o is None else np.array([[o]], dtype=object) for o in ops]
    kern = MultilinearKernel.polynomial_scalar(g, tensor, slots, T, ops if any(o is not None for o in ops) else ())
    xis = [CnFunction.polynomial(_random_poly(rng, p, rng.randint(1, 3), -1, 2), T) for _ in range(slots)]
    return kern, xis


def criterion_bounds(seed: int = 0, instances: int = 200) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        failures = []
        kinds = {"c1": 0, "lq": 0}
        for i in range(instances):
            p = PRIMES[i % 3]
            T = Ball.integers(p, 24)
            aoi = ApproximationOfIdentity(T)
            if i % 2 == 0:
                kern, xis = _random_instance(rng, p, T, slots=rng.choice([1, 1, 2]))
                chk = c1_bound_check(kern, xis, aoi)
                kinds["c1"] += 1
            else:
                w = Fraction(rng.randint(1, 9), 10)
                events = [_random_instance(rng, p, T) for _ in range(2)]
                G = SimpleRandomField((w, 1 - w), tuple(e[0] for e in events))
                X = SimpleRandomField((w, 1 - w), tuple(e[1][0] for e in events))
                r, q, s = rng.choice(_EXPONENTS)
                chk = lq_bound_check(G, [X], aoi, r, q, s, order=rng.randint(0, 1))
                kinds["lq"] += 1
            if not chk.holds:
                failures.append(i)
        return not failures, {"instances": kinds, "failures": failures}
    return _timed(4, "C^1 and L^s bounds of antiderivatives", 60, body)


# 5 ---------------------------------------------------------------------------------

def _pvm_axioms(P: ProjectionValuedMeasure, rng) -> list[str]:
    bad = []
    n = P.dim
    I = MatrixOperator.identity(n, P.prime)
    if not P(P.everything()).equals(I):
        bad.append("P(X) = 1")
    if not P.is_null(frozenset()):
        bad.append("P(empty) = 0")
    atoms = list(P.everything())
    for _ in range(4):
        rng.shuffle(atoms)
        cut = rng.randint(0, len(atoms))
        A, B = frozenset(atoms[:cut]), frozenset(atoms[cut:])
        PA, PB = P(A), P(B)
        if not (PA @ PB).is_zero():
            bad.append("orthogonality")
        if not P(A | B).equals(PA + PB):
            bad.append("additivity")
        if not (PA @ PA).equals(PA):
            bad.append("idempotence")
    return bad


def _spectral_properties(P: ProjectionValuedMeasure, rng, p) -> list[str]:
    bad = []
    m = len(P.atoms)
    f = [_random_rational(rng, p, -2, 3) for _ in range(m)]
    g = [_random_rational(rng, p, -2, 3) for _ in range(m)]
    If, Ig = spectral_integral(f, P), spectral_integral(g, P)
    null = [i for i in range(m) if P.is_null([i])]
    # (I) changing f on null atoms does not change the integral; on a non-null atom it does
    f2 = list(f)
    for i in null:
        f2[i] = f2[i] + 1
    if not spectral_integral(f2, P).equals(If):
        bad.append("null-set invariance")
    live = [i for i in range(m) if i not in null]
    if live:
        f3 = list(f)
        f3[live[0]] = f3[live[0]] + 1
        if spectral_integral(f3, P).equals(If):
            bad.append("non-null sensitivity")
    a, b = _random_rational(rng, p), _random_rational(rng, p)
    if not spectral_integral([a * x + b * y for x, y in zip(f, g)], P).equals(If.scale(a) + Ig.scale(b)):
        bad.append("linearity")
    if not spectral_integral([x * y for x, y in zip(f, g)], P).equals(If @ Ig):
        bad.append("multiplicativity")
    if operator_norm(If) != essential_sup(f, P):
        bad.append("isometry")
    A = frozenset(i for i in range(m) if rng.random() < 0.5)
    if not spectral_integral([1 if i in A else 0 for i in range(m)], P).equals(P(A)):
        bad.append("indicator")
    if not spectral_integral([1] * m, P).equals(MatrixOperator.identity(P.dim, p)):
        bad.append("integral of 1")
    xi = [_random_rational(rng, p) for _ in range(P.dim)]
    eta = [_random_rational(rng, p) for _ in range(P.dim)]
    mu = P.scalar_measure(xi, eta)
    lhs = np.dot(np.array(eta, dtype=object), If @ xi)
    rhs = sum((f[i] * mu(frozenset([i])) for i in range(m)), Fraction(0))
    if lhs != rhs:
        bad.append("scalar measure")
    if not (P(A) @ If).equals(If @ P(A)):
        bad.append("commutation")
    return bad


def criterion_spectral(seed: int = 0, instances: int = 100) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        failures = {}
        for i in range(instances):
            p = PRIMES[i % 3]
            n = rng.randint(1, 8)
            diag = [_random_rational(rng, p, 0, 4) if rng.random() < 0.85 else Fraction(0) for _ in range(n)]
            if all(d == 0 for d in diag):
                diag[0] = Fraction(1)
            A = MatrixOperator.diagonal(diag, p)
            bad = []
            dec = spectral_decompose(A)
            if not dec.reconstruct().equals(A):
                bad.append("reconstruction")
            if dec.scale.norm() != operator_norm(A):
                bad.append("scale norm")
            P = ProjectionValuedMeasure.discrete(n, p)
            if not spectral_integral(diag, P).equals(A):
                bad.append("diagonal as spectral integral")
            bad += _pvm_axioms(P, rng) + _spectral_properties(P, rng, p)
            if i % 5 == 0:
                # a partition finer than the sampling grid has null cells
                depth = rng.randint(1, 2 if p < 5 else 1)
                Q = pvm_from_partition(partition(Ball.integers(p, 24), depth), Ball.integers(p, 24),
                                       depth - rng.randint(0, 1))
                bad += ["partition " + b for b in _pvm_axioms(Q, rng) + _spectral_properties(Q, rng, p)]
            if bad:
                failures[i] = bad
        return not failures, {"instances": instances, "failures": failures}
    return _timed(5, "projection-valued measures and spectral integrals", 10, body)


# 6 ---------------------------------------------------------------------------------

_QS = [1, 2, 3, Fraction(3, 2), Fraction(5, 2), math.inf]


def _random_matrix(rng, p, m, n) -> MatrixOperator:
    rows = [[_random_rational(rng, p, -1, 3) if rng.random() < 0.7 else Fraction(0) for _ in range(n)]
            for _ in range(m)]
    return MatrixOperator.from_rows(rows, p)


def _random_rep(rng, p, m, n) -> RankOneSum:
    A = _random_matrix(rng, p, m, n)
    return rng.choice([RankOneSum.rows_of, RankOneSum.columns_of])(A)


def criterion_nu_q(seed: int = 0, instances: int = 200) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        failures = {}
        for i in range(instances):
            p = PRIMES[i % 3]
            q = rng.choice(_QS)
            m, n = rng.randint(1, 4), rng.randint(1, 4)
            R1, R2 = _random_rep(rng, p, m, n), _random_rep(rng, p, m, n)
            bad = []
            if not le(nu_q(R1 + R2, q), Sum((nu_q(R1, q), nu_q(R2, q)))):
                bad.append("triangle")
            if not (R1 + R2).to_matrix().equals(R1.to_matrix() + R2.to_matrix()):
                bad.append("sum representation")
            b = _random_rational(rng, p, -1, 2)
            scaled = RankOneSum(tuple((a, y * b) for a, y in R1.terms), p, R1.shape)
            if not le(nu_q(scaled, q), Product((padic_abs(b, p), nu_q(R1, q)))) or \
                    not le(Product((padic_abs(b, p), nu_q(R1, q))), nu_q(scaled, q)):
                bad.append("homogeneity")
            A = R1.to_matrix()
            if not le(operator_norm(A), nu_q(A, q)):
                bad.append("operator norm")
            # commuting diagonal operators: nu_v(JS) <= nu_q(J) nu_r(S)
            r = rng.choice([x for x in _QS if (0 if x == math.inf else 1 / Fraction(x))
                            + (0 if q == math.inf else 1 / Fraction(q)) <= 1])
            d = rng.randint(1, 6)
            J = MatrixOperator.diagonal([_random_rational(rng, p, 0, 3) for _ in range(d)], p)
            S = MatrixOperator.diagonal([_random_rational(rng, p, 0, 3) for _ in range(d)], p)
            lhs, (nj, ns) = compose_check(J, S, q, r)
            if not le(lhs, Product((nj, ns))):
                bad.append("composition")
            # bounded operator on either side of an L_r representation
            S_left = _random_matrix(rng, p, rng.randint(1, 4), m)
            T_right = _random_matrix(rng, p, n, rng.randint(1, 4))
            if not le(nu_q(R1.compose_left(S_left), q), Product((operator_norm(S_left), nu_q(R1, q)))):
                bad.append("left composition")
            if not le(nu_q(R1.compose_right(T_right), q), Product((nu_q(R1, q), operator_norm(T_right)))):
                bad.append("right composition")
            if not R1.compose_left(S_left).to_matrix().equals(S_left @ R1.to_matrix()):
                bad.append("left representation")
            if not le(nu_q(adjoint(R1), q), nu_q(R1, q)):
                bad.append("adjoint")
            if not adjoint(R1).to_matrix().equals(R1.to_matrix().transpose()):
                bad.append("adjoint representation")
            if bad:
                failures[i] = bad
        return not failures, {"instances": instances, "failures": failures}
    return _timed(6, "nu_q norms of rank-one expansions", 10, body)


# 7 ---------------------------------------------------------------------------------

def admissible_times(p: int, count: int = 4) -> list[int]:
    """``t_i = 1 + p + ... + p**(i-1)``: the distances ``|t_i - t_k| = p**-min(i, k)`` all differ
    along index-increasing triples."""
    return [sum(p**j for j in range(i)) for i in range(count)]


def _subsequences(seq, min_len=2):
    for r in range(min_len, len(seq) + 1):
        yield from itertools.combinations(seq, r)


def criterion_quasimeasure(seed: int = 0) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        ok = True
        det = {"kernels": {}, "witness": None}
        for p in PRIMES:
            pool = admissible_times(p)
            for depth in (1, 2):
                X = Ball.integers(p, 24)
                for name, K in (("haar-ball", HaarBallKernel(X, depth)), ("delta", DeltaKernel(X, depth))):
                    rep = validate_kernel(K, pool)
                    n = K.size
                    consistency_fail = 0
                    bound_fail = 0
                    checked = 0
                    for q in _subsequences(pool):
                        vb = variation_bound(K, q)
                        if vb.C != 0 or vb.bound != 1:
                            bound_fail += 1
                        for v in _subsequences(q):
                            if v[0] != q[0]:
                                continue
                            anchor = rng.randrange(n)
                            event = [frozenset(c for c in range(n) if rng.random() < 0.5) for _ in v[1:]]
                            lifted, direct = marginal_consistency(K, q, v, event, anchor)
                            checked += 1
                            if lifted != direct:
                                consistency_fail += 1
                            if direct.abs2() > 1:
                                bound_fail += 1
                    good = rep.ok and consistency_fail == 0 and bound_fail == 0
                    ok = ok and good
                    det["kernels"][f"{name} p={p} d={depth}"] = {
                        "ck_triples": rep.triples_checked, "max_ck_residual": str(rep.max_ck_residual),
                        "consistency_checks": checked, "consistency_failures": consistency_fail,
                        "bound_failures": bound_fail}
        # signed kernel whose cylinder masses grow without bound
        X = Ball.integers(2, 24)
        step = LocallyConstantMeasure(X, 2, (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(-1, 2)))
        K = HomogeneousKernel(step, 4)
        levels = unbounded_variation_witness(K, {0, 1, 2}, levels=4)
        lower = [lv.lower_bound for lv in levels]
        growing = all(b > a for a, b in zip(lower, lower[1:])) and lower[0] > 1
        dominated = all(lv.mass.re >= lv.lower_bound and lv.mass.im == 0 for lv in levels)
        ck = validate_kernel(K, [0, 1, 2, 3, 5], ordered=False).ok
        ok = ok and growing and dominated and ck
        det["witness"] = {"levels": [{"steps": lv.steps, "mass": str(lv.mass), "lower_bound": str(lv.lower_bound)}
                                     for lv in levels], "kernel_valid": ck}
        return ok, det
    return _timed(7, "transition kernels and cylinder quasimeasures", 60, body)


# 8 ---------------------------------------------------------------------------------

def _random_complex_measure(rng, X, depth) -> LocallyConstantMeasure:
    n = X.prime**depth
    return LocallyConstantMeasure(X, depth, tuple(ComplexRational(Fraction(rng.randint(-4, 4), 7),
                                                                  Fraction(rng.randint(-4, 4), 5))
                                                  for _ in range(n)))


def criterion_characters(seed: int = 0, pairs: int = 10_000) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        hom_fail = 0
        for i in range(pairs):
            p = PRIMES[i % 3]
            g = _random_padic(rng, p, 16, -4, 2)
            x, y = _random_padic(rng, p, 16, -2, 3), _random_padic(rng, p, 16, -2, 3)
            if character_exponent(g, x + y) != (character_exponent(g, x) + character_exponent(g, y)) % 1:
                hom_fail += 1
        semi_fail = 0
        render = 0.0
        checks = 0
        for p in PRIMES:
            X = Ball.integers(p, 24)
            for depth in (1, 2):
                measures = [LocallyConstantMeasure.uniform(X, depth), _random_complex_measure(rng, X, depth),
                            LocallyConstantMeasure.delta(X, depth)]
                if p == 2 and depth == 2:
                    measures.append(LocallyConstantMeasure(X, 2, (Fraction(1, 2),) * 3 + (Fraction(-1, 2),)))
                for P1 in measures:
                    powers = [homogeneous_iterate(P1, m) for m in range(6)]
                    for v in range(-depth - 1, 2):
                        gamma = PadicNumber.exact(Fraction(rng.randrange(1, p**4) * p + 1) * power(p, v), p, 12)
                        psi = [characteristic_functional(P, gamma) for P in powers]
                        for m1 in range(6):
                            for m2 in range(6 - m1):
                                checks += 1
                                if not psi[m1 + m2] == psi[m1] * psi[m2]:
                                    semi_fail += 1
                                render = max(render, abs(complex(psi[m1 + m2]) - complex(psi[m1]) * complex(psi[m2])))
        ok = hom_fail == 0 and semi_fail == 0 and render <= 1e-9
        return ok, {"pairs": pairs, "homomorphism_failures": hom_fail, "semigroup_checks": checks,
                    "semigroup_failures": semi_fail, "max_render_error": f"{render:.3e}"}
    return _timed(8, "characters and characteristic functionals", 10, body)


# 9 ---------------------------------------------------------------------------------

def criterion_ito(seed: int = 0, seeds: int = 50, precision: int = 20) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        failures = []
        worst = {}
        for p in PRIMES:
            law = ProcessLaw.default(p, precision=precision)
            target = power(p, -15)
            worst_tail = Fraction(0)
            for s in range(seeds):
                path = sample_path(law, seed * 1000 + s)
                h = Polynomial([rng.randint(-9, 9) for _ in range(rng.randint(2, 5))], p)
                t = rng.randrange(p**precision)
                xi0 = rng.randint(-5, 5)
                c = rng.randint(-3, 3)
                for shape in ("constant", "polynomial"):
                    if shape == "constant":
                        a, E = Fraction(rng.randint(-4, 4)), Fraction(rng.choice([1, 2, 3, -1]))
                    else:
                        a = Polynomial([rng.randint(-3, 3) for _ in range(3)], p)
                        E = Polynomial([rng.randint(-3, 3) for _ in range(2)], p)
                    chk = ito_cross_check(h, c, a, E, xi0, path, t)
                    rep = chk.reports["polynomial"]
                    worst_tail = max(worst_tail, rep.tail_bound)
                    if not (chk.holds and rep.tail_bound <= target):
                        failures.append({"prime": p, "seed": s, "shape": shape,
                                         "residual": str(rep.residual), "tail": str(rep.tail_bound)})
            worst[p] = str(worst_tail)
        return not failures, {"seeds_per_prime": seeds, "worst_tail_bound": worst, "failures": failures}
    return _timed(9, "Ito identities", 120, body)


# 10 --------------------------------------------------------------------------------

def _path_bytes(law, seed) -> bytes:
    path = sample_path(law, seed)
    nodes = [[n, v.canonical(), w.canonical()] for n, v, w in path.node_values(Fraction(1234567), 12)]
    return json.dumps({"path": path.to_json(), "nodes": nodes}, sort_keys=True).encode()


def criterion_process(seed: int = 0, samples: int = 100_000, depth: int = 2) -> CriterionResult:
    def body():
        tv = {}
        ok = True
        for p in PRIMES:
            law = ProcessLaw.default(p)
            rep = increment_law_check(law, 1 + p, 1, depth, samples, seed=seed)
            again = increment_law_check(law, 1 + p, 1, depth, samples, seed=seed)
            tv[p] = round(rep.tv, 6)
            ok = ok and rep.tv <= 0.05 and rep.empirical == again.empirical
            ok = ok and _path_bytes(law, seed) == _path_bytes(law, seed)
        return ok, {"samples": samples, "depth": depth, "tv": tv}
    return _timed(10, "process increments and seed determinism", 120, body)


CRITERIA = [
    criterion_ultrametric,
    criterion_identity_approximation,
    criterion_antiderivation,
    criterion_bounds,
    criterion_spectral,
    criterion_nu_q,
    criterion_quasimeasure,
    criterion_characters,
    criterion_ito,
    criterion_process,
]


def run_all(seed: int = 0, precision: int = 20, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for crit in CRITERIA:
        res = crit(seed, precision=precision) if crit is criterion_ito else crit(seed)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
