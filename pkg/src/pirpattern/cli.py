"""Command-line entry point.

Exit codes: 0 success, 1 a verification failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import converse, demo, privacy, scheme, sim
from .capacity import capacity_of_pattern, decimal6
from .catalog import PATTERNS
from .errors import PatternError
from .pattern import incidence, load_pattern
from .ratlp import build_lp1, build_lp2, fmt, fmt_vec, parse_fraction, solve

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    pattern: str | None = None
    example: str | None = None
    k: int = 1
    theta: int = 1
    seed: int = 0
    trials: int = 100_000
    json: bool = False


class UsageError(Exception):
    pass


def config_from_args(args) -> RunConfig:
    """Collect the common settings and check the K/theta invariants."""
    cfg = RunConfig(
        command=args.command,
        pattern=getattr(args, "pattern", None),
        example=getattr(args, "example", None),
        k=getattr(args, "k", None) or 1,
        theta=getattr(args, "theta", 1),
        seed=getattr(args, "seed", 0),
        trials=getattr(args, "trials", 100_000),
        json=args.json,
    )
    if cfg.k < 1:
        raise UsageError(f"K must be >= 1, got {cfg.k}")
    if not 1 <= cfg.theta <= cfg.k:
        raise UsageError(f"theta must be in [1, {cfg.k}]")
    return cfg


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {v}")
        return v

    return conv


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _fractions(text):
    try:
        return [parse_fraction(t) for t in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_pattern(sp):
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--pattern", help="pattern JSON file")
    g.add_argument("--example", choices=sorted(PATTERNS), help="built-in worked example")
    sp.add_argument("--normalize", action="store_true", help="reorder sets canonically")


def _pattern(args):
    if args.example:
        return PATTERNS[args.example]
    try:
        return load_pattern(args.pattern, canonical=args.normalize)
    except (OSError, json.JSONDecodeError, PatternError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read pattern {args.pattern}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pirpattern", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("capacity", help="S*, optimal vectors and capacity")
    _add_pattern(sp)
    sp.add_argument("--k", type=_positive("K"), required=True)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("lp", help="solve LP1 and/or LP2 exactly")
    _add_pattern(sp)
    sp.add_argument("--which", choices=["1", "2", "both"], default="both")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("synthesize", help="build a retrieval plan")
    _add_pattern(sp)
    sp.add_argument("--k", type=_positive("K"), required=True)
    sp.add_argument("--theta", type=_positive("theta"), default=1)
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--y", type=_fractions, help="comma-separated rational y (default: LP1 optimum)")
    sp.add_argument("--field", type=int, help="prime field size override")
    sp.add_argument("--out", help="write plan JSON here")
    sp.add_argument("--full", action="store_true", help="include matrices in the plan file")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("simulate", help="run a plan end to end")
    sp.add_argument("--plan", required=True)
    sp.add_argument("--seed", type=_nonneg, default=0, help="seed for random messages")
    sp.add_argument("--messages", help="JSON list of K message vectors")
    sp.add_argument("--transcript", help="write the transcript JSON here")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("verify", help="check privacy of a plan")
    sp.add_argument("--plan", required=True)
    sp.add_argument("--empirical", action="store_true")
    sp.add_argument("--trials", type=_positive("trials"), default=100_000)
    sp.add_argument("--theta-b", type=_positive("theta-b"), default=None)
    sp.add_argument("--tolerance", type=float, default=0.02)
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("certify", help="build or check a converse certificate")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--pattern")
    g.add_argument("--example", choices=sorted(PATTERNS))
    sp.add_argument("--normalize", action="store_true")
    sp.add_argument("--k", type=_positive("K"))
    sp.add_argument("--x", type=_fractions, help="feasible LP2 point (default: LP2 optimum)")
    sp.add_argument("--out", help="write certificate JSON here")
    sp.add_argument("--verify", metavar="CERT", help="check an existing certificate instead")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("demo", help="recompute the worked examples")
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--json", action="store_true")
    return p


def _emit(obj, args, text):
    if args.json:
        print(json.dumps(obj, indent=2))
    else:
        print(text)


def _cmd_capacity(args):
    res = capacity_of_pattern(_pattern(args), args.k)
    text = "\n".join(
        [
            f"S* = {fmt(res.s_star)}",
            f"y* = ({', '.join(fmt_vec(res.y_star))})",
            f"x* = ({', '.join(fmt_vec(res.x_star))})",
            f"C  = {fmt(res.capacity)} ({res.decimal})",
        ]
    )
    _emit(res.to_json(), args, text)
    return EXIT_OK


def _cmd_lp(args):
    b = incidence(_pattern(args))
    out, lines = {}, []
    for tag, build in (("1", build_lp1), ("2", build_lp2)):
        if args.which in (tag, "both"):
            s = solve(build(b))
            out[f"lp{tag}"] = {
                "status": s.status,
                "value": fmt(s.optimal_value),
                "vector": fmt_vec(s.optimal_vector),
            }
            lines.append(f"LP{tag}: {s.status}, value {fmt(s.optimal_value)}, "
                         f"vector ({', '.join(fmt_vec(s.optimal_vector))})")
    _emit(out, args, "\n".join(lines))
    return EXIT_OK


def _plan_text(plan):
    lines = [
        f"pattern    {plan.pattern}",
        f"K={plan.k_messages} theta={plan.theta} seed={plan.seed}",
        f"y          ({', '.join(fmt_vec(plan.y))}), S = {fmt(plan.s)}",
        f"L          {plan.block_length}",
        f"q          {plan.field}",
        "budgets    " + ", ".join(f"|K|={j}: {b}" for j, b in plan.budgets.items()),
        "codes      " + (", ".join(f"({n},{d}) {plan.code_kind(j)}" for j, (n, d) in plan.code_shapes.items()) or "none"),
        "rows/db    " + " ".join(str(c) for c in plan.rows_per_database()),
        f"downloaded {plan.downloaded}",
        f"rate       {fmt(plan.rate)} ({decimal6(plan.rate)})",
    ]
    return "\n".join(lines)


def _cmd_synthesize(args):
    plan = scheme.synthesize(_pattern(args), args.k, args.theta, seed=args.seed, y=args.y, field=args.field)
    if args.out:
        scheme.dump_plan(plan, args.out, full=args.full)
    _emit(plan.to_json(full=args.full), args, _plan_text(plan))
    return EXIT_OK


def _load_plan(path):
    try:
        return scheme.load_plan(path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read plan {path}: {exc}")


def _cmd_simulate(args):
    plan = _load_plan(args.plan)
    messages = None
    if args.messages:
        try:
            with open(args.messages) as fh:
                messages = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read messages {args.messages}: {exc}")
    import numpy as np

    tr = sim.run(plan, messages=messages, rng=np.random.default_rng(args.seed))
    if args.transcript:
        sim.dump_transcript(tr, args.transcript)
    rate = sim.measured_rate(tr)
    obj = {"decoded_matches": tr.success, "downloaded": tr.downloaded, "rate": fmt(rate)}
    text = f"decoded matches W_{plan.theta}: {tr.success}\ndownloaded: {tr.downloaded}\nrate: {fmt(rate)}"
    _emit(obj, args, text)
    return EXIT_OK if tr.success else EXIT_FAIL


def _cmd_verify(args):
    plan = _load_plan(args.plan)
    rep = privacy.verify_rank_privacy(plan)
    obj = {"rank": rep.to_json()}
    lines = [f"rank check: {'PASS' if rep.passed else 'FAIL'} (L/S = {fmt(rep.limit)})"]
    for e in rep.entries:
        status = "ok" if e.ok else "FAIL: " + "; ".join(e.failures)
        lines.append(f"  set {{{','.join(map(str, e.colluding_set))}}}: tau={fmt(e.tau)} "
                     f"ranks={list(e.ranks)} {status}")
    ok = rep.passed
    if args.empirical:
        theta_b = args.theta_b or (plan.theta % plan.k_messages) + 1
        if theta_b > plan.k_messages:
            raise UsageError(f"theta-b must be in [1, {plan.k_messages}]")
        emp = privacy.empirical_indistinguishability(
            plan.pattern, plan.k_messages, plan.theta, theta_b, plan.field,
            args.trials, args.seed, y=plan.y,
        )
        emp_ok = emp.max_tv < args.tolerance
        ok = ok and emp_ok
        obj["empirical"] = {
            "theta_a": plan.theta,
            "theta_b": theta_b,
            "trials": emp.trials,
            "tolerance": args.tolerance,
            "tv": [{"set": list(t), "tv": round(v, 6)} for t, v in emp.tv.items()],
            "passed": emp_ok,
        }
        lines.append(f"empirical check (theta {plan.theta} vs {theta_b}, {emp.trials} trials): "
                     f"{'PASS' if emp_ok else 'FAIL'}")
        for t, v in emp.tv.items():
            lines.append(f"  set {{{','.join(map(str, t))}}}: TV={v:.6f}")
    obj["passed"] = ok
    _emit(obj, args, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_certify(args):
    if args.verify:
        try:
            cert = converse.load_certificate(args.verify)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UsageError(f"cannot read certificate {args.verify}: {exc}")
        pattern = _pattern(args) if (args.pattern or args.example) else None
        verdict = converse.verify_certificate(cert, pattern)
        obj = {"valid": verdict.ok, "failed_check": verdict.failed_check, "detail": verdict.detail}
        text = "certificate valid" if verdict else f"certificate INVALID: {verdict.failed_check}: {verdict.detail}"
        _emit(obj, args, text)
        return EXIT_OK if verdict else EXIT_FAIL
    if not (args.pattern or args.example) or args.k is None:
        raise UsageError("certify needs --pattern/--example and --k (or --verify CERT)")
    bound, cert = converse.converse_bound(_pattern(args), args.k, x=args.x)
    if args.out:
        converse.dump_certificate(cert, args.out)
    n_full = sum(1 for s in cert.final.sets if s == cert.final.full)
    text = "\n".join(
        [
            f"x = ({', '.join(fmt_vec(cert.x))}), sum = {fmt(sum(cert.x, Fraction(0)))}",
            f"G = {cert.g}, G_m = {list(cert.gm)}",
            f"deletions: {len(cert.deletions)}, merge steps: {len(cert.steps)}",
            f"final: {n_full} full sets, {len(cert.final) - n_full} empty sets",
            f"upper bound: {fmt(bound)} ({decimal6(bound)})",
        ]
    )
    _emit(cert.to_json(), args, text)
    return EXIT_OK


def _cmd_demo(args):
    rows = demo.run_examples(seed=args.seed)
    ok = all(r.ok for r in rows)
    _emit({"passed": ok, "examples": demo.to_json(rows)}, args, demo.render(rows))
    return EXIT_OK if ok else EXIT_FAIL


_COMMANDS = {
    "capacity": _cmd_capacity,
    "lp": _cmd_lp,
    "synthesize": _cmd_synthesize,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "certify": _cmd_certify,
    "demo": _cmd_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        config_from_args(args)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # bad parameters from the library (pattern, field, y, ...)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
