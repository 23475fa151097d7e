"""Command-line entry point ``padic-stochastic``.

Every subcommand writes one report (JSON by default, CSV where tabular) and
exits 0 when all checked contracts hold, 1 on a contract violation and 2 on
a usage error. Reports carry ``"schema": 1``, p-adic values in canonical text
and bounds as exact rationals, and contain nothing run-dependent, so the same
config and seed give byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import acceptance
from .antiderivation import MultilinearKernel, antiderive_multilinear
from .banach import (
    MatrixOperator,
    ProjectionValuedMeasure,
    UnsupportedOperator,
    essential_sup,
    operator_norm,
    spectral_decompose,
    spectral_integral,
)
from .cyclotomic import ComplexRational
from .function_spaces import (
    ApproximationOfIdentity,
    CnFunction,
    Polynomial,
    mahler_eval,
    mahler_expand,
)
from .padic import Ball, PadicNumber, is_prime
from .quasimeasure import (
    DeltaKernel,
    HaarBallKernel,
    LocallyConstantMeasure,
    WeightedKernel,
    characteristic_functional,
    homogeneous_iterate,
    marginal_consistency,
    validate_kernel,
    variation_bound,
)
from .stochastic import ProcessLaw, ito_cross_check, sample_path, stochastic_integral

SCHEMA = 1
SUBCOMMANDS = ("expand", "antideriv", "spectral", "quasimeasure", "sample-paths",
               "sto-integral", "ito-check", "verify-all")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    prime: int
    precision: int = 20
    terms: int | None = None
    degree: int | None = None
    seeds: list = field(default_factory=lambda: [0])
    format: str = "json"
    out: str | None = None
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.prime, int) or not is_prime(self.prime):
            raise UsageError(f"--prime must be a prime, got {self.prime!r}")
        if self.precision < 4:
            raise UsageError("--precision must be at least 4")
        for name in ("terms", "degree"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"--{name} must be at least 1")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")

    @property
    def seed(self) -> int:
        return self.seeds[0]


# value parsing ---------------------------------------------------------------------

def parse_value(x, p: int, precision: int):
    """A rational (int, "a/b") or a canonical p-adic string "p:v:digits"."""
    if isinstance(x, str) and ":" in x:
        v = PadicNumber.parse(x)
        if v.prime != p:
            raise UsageError(f"value {x} is not {p}-adic")
        return v
    try:
        return Fraction(x)
    except (TypeError, ValueError):
        raise UsageError(f"cannot read a number from {x!r}") from None


def _point(x, p: int, precision: int) -> PadicNumber:
    v = parse_value(x, p, precision)
    return v if isinstance(v, PadicNumber) else PadicNumber.exact(v, p, precision)


def _poly(coeffs, p: int, precision: int) -> Polynomial:
    if not isinstance(coeffs, list):
        coeffs = [coeffs]
    return Polynomial([parse_value(c, p, precision) for c in coeffs], p)


def render(x) -> Any:
    """JSON-friendly exact form."""
    if isinstance(x, PadicNumber):
        return x.canonical()
    if isinstance(x, (Fraction, int)):
        return str(Fraction(x))
    if isinstance(x, ComplexRational):
        return x.to_json()
    if isinstance(x, (list, tuple)):
        return [render(y) for y in x]
    return x


def _domain(spec: dict | None, p: int, precision: int) -> Ball:
    if not spec:
        return Ball.integers(p, precision + 8)
    return Ball(_point(spec.get("center", 0), p, precision + 8), int(spec.get("radius_exp", 0)))


# subcommands -----------------------------------------------------------------------

def cmd_expand(cfg: RunConfig) -> tuple[dict, bool]:
    p = cfg.prime
    raw = cfg.payload.get("samples")
    if raw is None:
        raise UsageError("expand needs --samples")
    samples = [parse_value(s, p, cfg.precision) for s in raw]
    M = cfg.degree if cfg.degree is not None else len(samples) - 1
    if M + 1 > len(samples):
        raise UsageError(f"degree {M} needs {M + 1} samples")
    series = mahler_expand(samples, M, prime=p)
    # round trip: the expansion must reproduce every sample it was built from
    mismatches = []
    for u in range(M + 1):
        back = mahler_eval(series, PadicNumber.exact(u, p, cfg.precision))
        want = samples[u]
        want = want if isinstance(want, PadicNumber) else PadicNumber.exact(want, p, cfg.precision)
        if not (back - want).is_zero():
            mismatches.append({"u": u, "expected": want.canonical(), "got": back.canonical()})
    report = {"degree": M, "coefficients": render(list(series.coefficients)),
              "sup_norm": render(series.sup_norm())}
    if mismatches:
        report["diff"] = mismatches
    return report, not mismatches


def cmd_antideriv(cfg: RunConfig) -> tuple[dict, bool]:
    p, prec = cfg.prime, cfg.precision
    pl = cfg.payload
    T = _domain(pl.get("domain"), p, prec)
    g = _poly(pl.get("kernel", [1]), p, prec)
    xi = CnFunction.polynomial(_poly(pl.get("xi", [0, 1]), p, prec), T)
    kern = MultilinearKernel.polynomial_scalar(g, [1], 1, T)
    t = _point(pl.get("point", 1), p, prec)
    aoi = ApproximationOfIdentity(T)
    res = antiderive_multilinear(kern, [xi], aoi, t, cfg.terms)
    target = Fraction(1, p**prec)
    report = {"point": t.canonical(), "value": res.scalar.canonical(), "terms_used": res.terms_used,
              "tail_bound": render(res.tail_bound), "certified": res.certified,
              "target": render(target)}
    ok = res.certified and (cfg.terms is not None or res.tail_bound <= target)
    if not ok:
        report["diff"] = {"tail_bound": render(res.tail_bound), "target": render(target)}
    return report, ok


def _matrix(rows, p, prec) -> MatrixOperator:
    if not rows or not all(isinstance(r, list) and len(r) == len(rows[0]) for r in rows):
        raise UsageError("matrix must be a non-empty list of equal-length rows")
    return MatrixOperator.from_rows([[parse_value(x, p, prec) for x in r] for r in rows], p)


def _render_matrix(A: MatrixOperator) -> list:
    return [[render(x) for x in row] for row in A.entries.tolist()]


def cmd_spectral(cfg: RunConfig) -> tuple[dict, bool]:
    p, prec = cfg.prime, cfg.precision
    pl = cfg.payload
    action = pl.get("action", "decompose")
    if action == "decompose":
        A = _matrix(pl.get("matrix"), p, prec)
        try:
            dec = spectral_decompose(A, prec)
        except UnsupportedOperator as exc:
            raise UsageError(str(exc)) from None
        ok = dec.reconstruct().equals(A)
        report = {"action": action, "scale": dec.scale.canonical(), "U": _render_matrix(dec.U),
                  "projectors": [_render_matrix(P) for P in dec.projectors],
                  "singular_numbers": [[render(s), r] for s, r in dec.singular_numbers()],
                  "operator_norm": render(operator_norm(A)), "reconstructs": ok}
        if not ok:
            report["diff"] = {"reconstructed": _render_matrix(dec.reconstruct())}
        return report, ok
    if action == "integrate":
        f = [parse_value(x, p, prec) for x in pl.get("f", [])]
        if not f:
            raise UsageError("integrate needs a non-empty f")
        P = ProjectionValuedMeasure.discrete(len(f), p)
        I = spectral_integral(f, P)
        norm, sup = operator_norm(I), essential_sup(f, P)
        report = {"action": action, "operator": _render_matrix(I), "norm": render(norm),
                  "ess_sup": render(sup)}
        if norm != sup:
            report["diff"] = {"norm": render(norm), "ess_sup": render(sup)}
        return report, norm == sup
    raise UsageError(f"unknown spectral action {action!r}")


def _kernel(spec: dict, p: int, prec: int):
    depth = int(spec.get("depth", 1))
    base = Ball.integers(p, prec + 8)
    kind = spec.get("kind", "haar-ball")
    if kind == "haar-ball":
        return HaarBallKernel(base, depth)
    if kind == "delta":
        return DeltaKernel(base, depth)
    if kind == "weighted":
        table = spec.get("table")
        if table is None or len(table) != p**depth:
            raise UsageError(f"weighted kernel needs a table of {p**depth} weights")
        return WeightedKernel(base, depth, [_complex(w) for w in table])
    raise UsageError(f"unknown kernel kind {kind!r}")


def _complex(w) -> ComplexRational:
    if isinstance(w, list):
        return ComplexRational(Fraction(w[0]), Fraction(w[1]))
    return ComplexRational.of(Fraction(w))


def cmd_quasimeasure(cfg: RunConfig) -> tuple[dict, bool]:
    p, prec = cfg.prime, cfg.precision
    pl = cfg.payload
    check = pl.get("check", "consistency")
    K = _kernel(pl.get("kernel", {}), p, prec)
    times = [parse_value(t, p, prec) for t in pl.get("times", acceptance.admissible_times(p))]
    report: dict = {"check": check, "kernel": pl.get("kernel", {"kind": "haar-ball", "depth": 1})}
    if check == "consistency":
        rep = validate_kernel(K, times)
        failures = []
        n = K.size
        events = 0
        for r in range(2, len(times) + 1):
            for q in itertools.combinations(times, r):
                for s in range(2, len(q) + 1):
                    for v in itertools.combinations(q, s):
                        if v[0] != q[0]:
                            continue
                        # the whole cell set at every time but one, so each check is informative
                        for hole in range(len(v) - 1):
                            event = [frozenset(range(n)) if j != hole else frozenset(range(0, n, 2))
                                     for j in range(len(v) - 1)]
                            lifted, direct = marginal_consistency(K, q, v, event, 0)
                            events += 1
                            if lifted != direct:
                                failures.append({"q": render(list(q)), "v": render(list(v)),
                                                 "lifted": lifted.to_json(), "direct": direct.to_json()})
        report.update({"normalization_failures": len(rep.normalization_failures),
                       "additivity_ok": rep.additivity_ok, "ck_triples": rep.triples_checked,
                       "max_ck_residual": render(rep.max_ck_residual),
                       "ck_failures": rep.ck_failures, "consistency_checks": events})
        ok = rep.ok and not failures
        if failures:
            report["diff"] = failures
        return report, ok
    if check == "variation":
        vb = variation_bound(K, times)
        report.update({"step_variations": render(vb.step_variations), "bound": render(vb.bound),
                       "C": repr(vb.C)})
        return report, True
    if check == "semigroup":
        table = pl.get("kernel", {}).get("table")
        base = K.base
        step = (LocallyConstantMeasure(base, K.depth, tuple(_complex(w) for w in table)) if table
                else LocallyConstantMeasure.uniform(base, K.depth))
        gammas = [_point(g, p, prec) for g in pl.get("gammas", [Fraction(1, p), Fraction(1, p**K.depth)])]
        top = int(pl.get("max_power", 5))
        powers = [homogeneous_iterate(step, m) for m in range(top + 1)]
        failures = []
        values = {}
        for gamma in gammas:
            psi = [characteristic_functional(P, gamma) for P in powers]
            values[gamma.canonical()] = [repr(complex(x)) for x in psi]
            for m1 in range(top + 1):
                for m2 in range(top + 1 - m1):
                    if not psi[m1 + m2] == psi[m1] * psi[m2]:
                        failures.append({"gamma": gamma.canonical(), "m1": m1, "m2": m2})
        report.update({"values": values, "checks": (top + 1) * (top + 2) // 2 * len(gammas)})
        if failures:
            report["diff"] = failures
        return report, not failures
    raise UsageError(f"unknown check {check!r}")


def _law(cfg: RunConfig) -> ProcessLaw:
    p = cfg.prime
    alphas = cfg.payload.get("alphas")
    if alphas is None:
        return ProcessLaw.default(p, cfg.degree, precision=cfg.precision)
    try:
        return ProcessLaw(p, tuple(Fraction(a) for a in alphas), Ball.integers(p), cfg.precision)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_sample_paths(cfg: RunConfig) -> tuple[dict, bool]:
    law = _law(cfg)
    t = parse_value(cfg.payload.get("t", 1 + cfg.prime), cfg.prime, cfg.precision)
    count = cfg.terms or cfg.precision
    rows = []
    paths = []
    for seed in cfg.seeds:
        path = sample_path(law, seed)
        paths.append(path.to_json())
        for n, node, value in path.node_values(t, count):
            rows.append({"seed": seed, "n": n, "node": node.canonical(), "value": value.canonical()})
    return {"law": {"alphas": render(list(law.alphas)), "precision": law.precision},
            "paths": paths, "nodes": rows}, True


def _integrand(spec, p, prec):
    if isinstance(spec, list):
        return _poly(spec, p, prec)
    return parse_value(spec, p, prec)


def cmd_sto_integral(cfg: RunConfig) -> tuple[dict, bool]:
    p, prec = cfg.prime, cfg.precision
    law = _law(cfg)
    E = _integrand(cfg.payload.get("E", 1), p, prec)
    t = parse_value(cfg.payload.get("t", 1 + p), p, prec)
    out = []
    for seed in cfg.seeds:
        path = sample_path(law, seed)
        res = stochastic_integral(E, path, t, cfg.terms)
        out.append({"seed": seed, "value": res.scalar.canonical(), "terms_used": res.terms_used,
                    "tail_bound": render(res.tail_bound), "certified": res.certified})
    return {"integrals": out}, all(r["certified"] for r in out)


def cmd_ito_check(cfg: RunConfig) -> tuple[dict, bool]:
    p, prec = cfg.prime, cfg.precision
    pl = cfg.payload
    law = _law(cfg)
    h = _poly(pl.get("h", [0, 0, 1]), p, prec)
    c = parse_value(pl.get("c", 0), p, prec)
    a = _integrand(pl.get("a", 0), p, prec)
    E = _integrand(pl.get("E", 1), p, prec)
    xi0 = parse_value(pl.get("xi0", 0), p, prec)
    t = parse_value(pl.get("t", 1 + p), p, prec)
    out = []
    ok = True
    for seed in cfg.seeds:
        chk = ito_cross_check(h, c, a, E, xi0, sample_path(law, seed), t)
        entry = {"seed": seed, "disagreement": render(chk.disagreement), "bound": render(chk.bound),
                 "holds": chk.holds, "reports": {k: r.to_json() for k, r in chk.reports.items()}}
        if not chk.holds:
            entry["diff"] = {k: {"lhs": r.lhs.canonical(), "rhs": r.rhs.canonical(),
                                 "residual": render(r.residual), "tail_bound": render(r.tail_bound)}
                             for k, r in chk.reports.items() if not r.holds}
        ok = ok and chk.holds
        out.append(entry)
    return {"checks": out}, ok


def cmd_verify_all(cfg: RunConfig) -> tuple[dict, bool]:
    results = acceptance.run_all(cfg.seed, cfg.precision, echo=lambda s: print(s, file=sys.stderr))
    failed = [r.number for r in results if not r.ok]
    report = {"criteria": [r.to_json() for r in results], "failed": failed}
    return report, not failed


COMMANDS = {
    "expand": cmd_expand,
    "antideriv": cmd_antideriv,
    "spectral": cmd_spectral,
    "quasimeasure": cmd_quasimeasure,
    "sample-paths": cmd_sample_paths,
    "sto-integral": cmd_sto_integral,
    "ito-check": cmd_ito_check,
    "verify-all": cmd_verify_all,
}


# argument handling ---------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _json_arg(text: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from None


HELP = {
    "expand": "Mahler coefficients from samples f(0), ..., f(M)",
    "antideriv": "antiderivative along the digit-truncation nodes",
    "spectral": "spectral decomposition, nu_q norms or spectral integrals of a matrix",
    "quasimeasure": "consistency, variation or semigroup checks for a transition kernel",
    "sample-paths": "seeded process paths at the truncation nodes",
    "sto-integral": "stochastic integral of a polynomial along a sampled path",
    "ito-check": "verify the Ito identities and their cross-agreement per seed",
    "verify-all": "run the full acceptance suite",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int)
    common.add_argument("--precision", type=int)
    common.add_argument("--terms", type=int, help="truncation N of series")
    common.add_argument("--degree", type=int, help="truncation M of bases")
    common.add_argument("--seed", type=_int_list, help="seed or comma-separated seeds")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--config", help="JSON file whose keys override the flags")
    common.add_argument("--payload", type=_json_arg, help="subcommand input as JSON text or @file")

    parser = argparse.ArgumentParser(prog="padic-stochastic",
                                     description="Exact p-adic analysis checks with JSON/CSV reports.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, parents=[common], help=HELP[name])
        if name == "expand":
            sp.add_argument("--samples", help="comma-separated values f(0), f(1), ...")
        if name == "quasimeasure":
            sp.add_argument("--check", choices=("consistency", "variation", "semigroup"))
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {
        "prime": args.prime, "precision": args.precision, "terms": args.terms, "degree": args.degree,
        "seeds": args.seed, "format": args.format, "out": args.out, "payload": dict(args.payload or {}),
    }
    if getattr(args, "samples", None) is not None:
        values["payload"]["samples"] = [s.strip() for s in args.samples.split(",") if s.strip()]
    if getattr(args, "check", None) is not None:
        values["payload"]["check"] = args.check
    if args.config:
        try:
            with open(args.config) as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if "seed" in conf:
            conf["seeds"] = conf.pop("seed")
        if isinstance(conf.get("seeds"), int):
            conf["seeds"] = [conf["seeds"]]
        payload = {**values["payload"], **conf.pop("payload", {})}
        unknown = set(conf) - set(values)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(conf)
        values["payload"] = payload
    if values["prime"] is None:
        raise UsageError("--prime is required")
    defaults = {"precision": 20, "seeds": [0], "format": "json"}
    for k, v in defaults.items():
        if values[k] is None:
            values[k] = v
    return RunConfig(**values)


def emit(report: dict, cfg: RunConfig) -> str:
    if cfg.format == "csv":
        rows = _csv_rows(report)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["key", "value"],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _csv_rows(report: dict) -> list[dict]:
    if "nodes" in report:
        return report["nodes"]
    if "integrals" in report:
        return report["integrals"]
    if "criteria" in report:
        return [{"number": c["number"], "name": c["name"], "passed": c["passed"]} for c in report["criteria"]]
    return [{"key": k, "value": json.dumps(v, sort_keys=True)} for k, v in sorted(report.items())]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        body, ok = COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"padic-stochastic: error: {exc}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA, "command": args.command, "prime": cfg.prime, "precision": cfg.precision,
              "seeds": cfg.seeds, "ok": ok, **body}
    text = emit(report, cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        print("padic-stochastic: contract violation, see the report", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
