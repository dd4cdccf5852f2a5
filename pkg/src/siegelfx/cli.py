"""Command-line interface: ``siegelfx <command> ...``.

Exit codes: 0 success/pass, 1 audit failure, 2 input error, 3 arity or
reciprocity-function mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import group as grp
from ._backend import BACKEND
from .aggregators import (
    ARITHMETIC,
    BUILTINS,
    DEFAULT_EXPANSION_CAP,
    GEOMETRIC,
    Aggregator,
    beta_aggregator,
    expand_rational_probabilities,
    implied_probability,
    mix,
    weighted_geometric_mean,
)
from .audit import AuditConfig, audit, check_reciprocity_function
from .errors import ArityError, ParseError, ReciprocityViolation, SiegelError
from .io import detect_format, load_beta_spec, load_scenario, save_scenario, serialize_scenario
from .scenario import RateScenario

EXIT_OK, EXIT_AUDIT_FAIL, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2, 3

METHODS = ("geometric", "arithmetic", "harmonic", "median", "beta", "mix")
DEFAULT_SCENARIO = RateScenario((1.0, 4.0), metadata={"note": "two equally likely states"})


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _num(x: float) -> str:
    return f"{x:.12g}"


def _emit(args, payload: dict[str, Any], text: str) -> None:
    if args.output == "json":
        print(json.dumps(payload))
    else:
        print(text)


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from exc
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return v


def _parse_arities(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad arity list {text!r}") from exc
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("arities must be positive integers")
    return vals


def _base_aggregator(name: str, beta_file: str | None) -> Aggregator:
    if name in BUILTINS:
        return BUILTINS[name]
    if name == "beta":
        if not beta_file:
            raise CliError("--method beta needs --beta-file")
        return beta_aggregator(load_beta_spec(beta_file))
    raise CliError(f"unknown aggregator {name!r}")


def resolve_aggregator(method: str, beta_file: str | None = None, mix_spec: str | None = None) -> Aggregator:
    if method == "mix":
        if not mix_spec:
            raise CliError("--method mix needs --mix a0,a1,alpha")
        parts = [p.strip() for p in mix_spec.split(",")]
        if len(parts) != 3:
            raise CliError(f"--mix expects 'a0,a1,alpha', got {mix_spec!r}")
        try:
            alpha = float(parts[2])
        except ValueError:
            raise CliError(f"alpha {parts[2]!r} is not a number") from None
        return mix(_base_aggregator(parts[0], beta_file), _base_aggregator(parts[1], beta_file), alpha)
    return _base_aggregator(method, beta_file)


def _evaluator(agg: Aggregator, cap: int) -> Callable[[RateScenario], float]:
    """Evaluate on a scenario, honouring rational probabilities by expansion.

    The geometric mean has the closed weighted form and skips the expansion.
    """

    def ev(s: RateScenario) -> float:
        if s.is_uniform:
            return agg(s.rates)
        if agg is GEOMETRIC:
            return weighted_geometric_mean(s)
        return agg(expand_rational_probabilities(s, cap).rates)

    return ev


def _load_input(args) -> RateScenario:
    if getattr(args, "input", None) is None:
        return DEFAULT_SCENARIO
    return load_scenario(args.input, args.format)


def cmd_aggregate(args) -> int:
    agg = resolve_aggregator(args.method, args.beta_file, args.mix)
    s = load_scenario(args.input, args.format)
    ev = _evaluator(agg, args.cap)
    rate = ev(s)
    gap = rate * ev(s.reciprocal()) - 1.0
    payload = {"method": agg.name, "rate": rate, "n": s.n, "siegel_gap": gap}
    _emit(args, payload, f"{agg.name} forward rate: {_num(rate)}  (n={s.n}, siegel_gap={_num(gap)})")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = AuditConfig(
        sample_count=args.samples, tolerance=args.tolerance, seed=args.seed,
        **({"arities": args.arity} if args.arity else {}),
    )
    sections: list[str] = []
    payload: dict[str, Any] = {"seed": cfg.seed, "tolerance": cfg.tolerance, "samples": cfg.sample_count}
    passed = True
    if args.beta_file and args.method in (None, "beta"):
        beta = load_beta_spec(args.beta_file, validate=False)
        res = check_reciprocity_function(beta, cfg)
        payload["reciprocity_function"] = {
            "name": beta.name, "passed": res.passed,
            "worst_violation": res.worst_violation, "witness": res.witness,
        }
        status = "pass" if res.passed else "FAIL"
        sections.append(f"reciprocity function {beta.name}: {status}  worst={res.worst_violation:.3e}")
        if not res.passed:
            sections.append(f"  witness: u={res.witness['u'] if res.witness else None}")
            _emit(args, {**payload, "passed": False}, "\n".join(sections))
            return EXIT_AUDIT_FAIL
        agg = beta_aggregator(beta)
    elif args.method:
        agg = resolve_aggregator(args.method, args.beta_file, args.mix)
    else:
        raise CliError("check needs --method or --beta-file")
    report = audit(agg, cfg)
    passed = report.passed
    payload["audit"] = report.to_dict()
    payload["passed"] = passed
    sections.append(report.render())
    _emit(args, payload, "\n".join(sections))
    return EXIT_OK if passed else EXIT_AUDIT_FAIL


def cmd_demo_siegel(args) -> int:
    s = _load_input(args)
    resolution = resolve_aggregator(args.method, args.beta_file, args.mix)
    am = _evaluator(ARITHMETIC, args.cap)
    res = _evaluator(resolution, args.cap)
    inv = s.reciprocal()
    eur, usd = am(s), am(inv)
    q, qi = res(s), res(inv)
    payload = {
        "rates": list(s.rates),
        "probabilities": None if s.probabilities is None else [str(p) for p in s.probabilities],
        "arithmetic": {"quote": eur, "reciprocal_quote": usd, "product": eur * usd, "siegel_gap": eur * usd - 1.0},
        "resolution": {"method": resolution.name, "quote": q, "reciprocal_quote": qi, "siegel_gap": q * qi - 1.0},
    }
    text = "\n".join([
        f"rates: {', '.join(_num(r) for r in s.rates)}"
        + ("" if s.probabilities is None else f"  probabilities: {', '.join(map(str, s.probabilities))}"),
        "arithmetic-mean pricing (each side takes its own expected value):",
        f"  EUR quote (USD per EUR):  {_num(eur)}",
        f"  USD quote (EUR per USD):  {_num(usd)}",
        f"  product of quotes:        {_num(eur * usd)}",
        f"  round-trip gap:           {_num(eur * usd - 1.0)}",
        f"{resolution.name} pricing:",
        f"  EUR quote (USD per EUR):  {_num(q)}",
        f"  USD quote (EUR per USD):  {_num(qi)}",
        f"  round-trip gap:           {_num(q * qi - 1.0)}",
    ])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_demo_group(args) -> int:
    n = args.n
    if n < 1:
        raise CliError("--n must be positive")
    rng = np.random.default_rng(args.seed)
    g1, g2 = grp.random_element(n, rng), grp.random_element(n, rng)
    x = rng.uniform(-5.0, 5.0, size=n)
    hom = float(np.max(np.abs(grp.to_matrix(grp.compose(g1, g2)) - grp.to_matrix(g1) @ grp.to_matrix(g2))))
    aggs = [GEOMETRIC, BUILTINS["median"], ARITHMETIC]
    checks = {}
    for g_name, g in (("g1", g1), ("reflection", grp.reflection(n))):
        for a in aggs:
            r = grp.check_equivariance(a, g, x, args.tolerance)
            checks[f"{a.name}/{g_name}"] = {"passed": r.passed, "deviation": r.deviation}
    elements = [grp.random_element(n, rng) for _ in range(200)]
    free = grp.orbit_is_free(x, elements)
    payload = {
        "seed": args.seed, "n": n,
        "g1": {"sign": g1.sign, "perm": list(g1.perm), "shift": g1.shift},
        "g2": {"sign": g2.sign, "perm": list(g2.perm), "shift": g2.shift},
        "matrix_g1": grp.to_matrix(g1).tolist(),
        "homomorphism_error": hom, "x": x.tolist(),
        "equivariance": checks, "orbit_free_on_sample": free,
    }
    lines = [
        f"seed={args.seed} n={n}",
        f"g1: sign={g1.sign:+d} perm={list(g1.perm)} shift={_num(g1.shift)}  character={grp.character(g1):+d}",
        "matrix(g1):",
        *("  " + " ".join(f"{v:9.4f}" for v in row) for row in grp.to_matrix(g1)),
        f"max |M(g1 g2) - M(g1) M(g2)| = {hom:.3e}",
        f"x = {[round(v, 6) for v in x.tolist()]}",
        "equivariance h(g x) == eps(g) h(x):",
        *(f"  {k:<24} {'pass' if v['passed'] else 'FAIL'}  deviation={v['deviation']:.3e}" for k, v in checks.items()),
        f"orbit of x under 200 sampled elements has no repeats: {free}",
    ]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_implied_prob(args) -> int:
    p = implied_probability(args.e1, args.e2)
    low = 1 if args.e1 < args.e2 else 2 if args.e2 < args.e1 else None
    gm = float(np.sqrt(args.e1) * np.sqrt(args.e2))
    payload = {"e1": args.e1, "e2": args.e2, "p": p, "one_minus_p": 1.0 - p, "geometric_mean": gm, "low_rate_state": low}

    def tag(state: int) -> str:
        return "  (low-rate state)" if low == state else ""

    text = "\n".join([
        f"state 1 (rate {_num(args.e1)}): p     = {_num(p)}{tag(1)}",
        f"state 2 (rate {_num(args.e2)}): 1 - p = {_num(1.0 - p)}{tag(2)}",
        f"p * e1 + (1 - p) * e2 = {_num(p * args.e1 + (1 - p) * args.e2)} = sqrt(e1 e2) = {_num(gm)}",
    ])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_expand(args) -> int:
    s = load_scenario(args.input, args.format)
    if s.probabilities is None:
        out = s
    else:
        out = expand_rational_probabilities(s, args.cap)
    if args.out:
        save_scenario(out, args.out, args.out_format)
        msg = f"wrote {out.n} equally likely rates to {args.out}"
        _emit(args, {"n": out.n, "out": str(args.out)}, msg)
    else:
        fmt = args.out_format or ("json" if args.output == "json" else "csv")
        sys.stdout.write(serialize_scenario(out, fmt))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=_seed, default=argparse.SUPPRESS)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="siegelfx", description="Arbitrage-free forward exchange rate aggregation."
    )
    parser.add_argument("--output", choices=("text", "json"), default="text")
    parser.add_argument("--seed", type=_seed, default=0)
    parser.add_argument("--tolerance", type=float, default=1e-9)
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 (kernels: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    def method_args(p, default=None, required=False):
        p.add_argument("--method", choices=METHODS, default=default, required=required)
        p.add_argument("--beta-file")
        p.add_argument("--mix", metavar="A0,A1,ALPHA")

    def input_args(p, required=True):
        p.add_argument("--input", required=required, metavar="FILE")
        p.add_argument("--format", choices=("json", "csv"), help="input format (default: from extension)")
        p.add_argument("--cap", type=int, default=DEFAULT_EXPANSION_CAP, help="max expanded scenario size")

    p = sub.add_parser("aggregate", parents=[common], help="aggregate a scenario into one forward rate")
    method_args(p, required=True)
    input_args(p)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("check", parents=[common], help="audit an aggregator against the three axioms")
    method_args(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--arity", type=_parse_arities, help="comma-separated scenario sizes to sample")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("demo-siegel", parents=[common], help="show the arithmetic-mean paradox and its resolution")
    method_args(p, default="geometric")
    input_args(p, required=False)
    p.set_defaults(func=cmd_demo_siegel)

    p = sub.add_parser("demo-group", parents=[common], help="demonstrate the transformation group and equivariance")
    p.add_argument("--n", type=int, default=3)
    p.set_defaults(func=cmd_demo_group)

    p = sub.add_parser("implied-prob", parents=[common], help="probability making the geometric mean an expectation")
    p.add_argument("e1", type=float)
    p.add_argument("e2", type=float)
    p.set_defaults(func=cmd_implied_prob)

    p = sub.add_parser("expand", parents=[common], help="expand rational probabilities into equally likely states")
    input_args(p)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--out-format", choices=("json", "csv"))
    p.set_defaults(func=cmd_expand)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ArityError, ReciprocityViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except SiegelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
