"""Recompute the worked examples and compare against their reference values."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .capacity import capacity_from_s
from .catalog import PATTERNS, REFERENCE
from .converse import (
    build_collection,
    converse_bound,
    delete_to_even,
    even_property,
    integerize,
    run_algorithm1,
)
from .pattern import incidence
from .privacy import verify_rank_privacy
from .ratlp import build_lp1, build_lp2, fmt, solve
from .scheme import synthesize
from .sim import build_queries, measured_rate, run


@dataclass(frozen=True)
class Check:
    label: str
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class Row:
    name: str
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _show(v):
    if isinstance(v, Fraction):
        return fmt(v)
    if isinstance(v, tuple):
        return "(" + ",".join(_show(i) for i in v) + ")"
    return str(v)


def _lp(p):
    b = incidence(p)
    return solve(build_lp1(b)), solve(build_lp2(b))


def _p1(seed):
    ref, p = REFERENCE["P1"], PATTERNS["P1"]
    s1, s2 = _lp(p)
    plan = synthesize(p, ref["k"], 1, seed=seed)
    queries = build_queries(plan)
    rep = verify_rank_privacy(plan, queries)
    tr = run(plan)
    _, cert = converse_bound(p, ref["k"])
    return [
        Check("S*", ref["s_star"], s1.optimal_value),
        Check("S2*", ref["s_star"], s2.optimal_value),
        Check("y*", ref["y_star"], s1.optimal_vector),
        Check("x*", ref["x_star"], s2.optimal_vector),
        Check("L", ref["L"], plan.block_length),
        Check("rows per database", ref["rows_per_db"], plan.rows_per_database()),
        Check("decoded", True, tr.success),
        Check("rate", ref["rate"], measured_rate(tr)),
        Check("view rank", (ref["view_rank"],) * (p.n_sets * 2), tuple(r for e in rep.entries for r in e.ranks)),
        Check("G", ref["g"], cert.g),
        Check("G_m", ref["gm"], cert.gm),
        Check("converse bound", ref["rate"], cert.bound),
    ]


def _p2(seed):
    ref, p = REFERENCE["P2"], PATTERNS["P2"]
    s1, s2 = _lp(p)
    plan = synthesize(p, ref["k"], 1, seed=seed)
    tr = run(plan)
    bound, cert = converse_bound(p, ref["k"], x=ref["x_star"])
    queried = tuple(n + 1 for n, c in enumerate(plan.rows_per_database()) if c)
    return [
        Check("S*", ref["s_star"], s1.optimal_value),
        Check("S2*", ref["s_star"], s2.optimal_value),
        Check("y*", ref["y_star"], s1.optimal_vector),
        Check("L", ref["L"], plan.block_length),
        Check("queried databases", (1, 2), queried),
        Check("decoded", True, tr.success),
        Check("rate", ref["rate"], measured_rate(tr)),
        Check("G", ref["g"], cert.g),
        Check("G_m", ref["gm"], cert.gm),
        Check("converse bound", ref["rate"], bound),
    ]


def _p3(seed):
    ref, p = REFERENCE["P3"], PATTERNS["P3"]
    s1, s2 = _lp(p)
    g, gm = integerize(s2.optimal_vector)
    trimmed, _ = delete_to_even(build_collection(p, gm), g)
    plan = synthesize(p, ref["k"], 1, seed=seed)
    tr = run(plan)
    bound, _ = converse_bound(p, ref["k"])
    return [
        Check("S*", ref["s_star"], s1.optimal_value),
        Check("x*", ref["x_star"], s2.optimal_vector),
        Check("G", ref["g"], g),
        Check("trimmed collection", ((1, 2, 3), (4, 5, 6, 7)), trimmed.sets),
        Check("decoded", True, tr.success),
        Check("rate", ref["rate"], measured_rate(tr)),
        Check("converse bound", ref["rate"], bound),
    ]


def _p4(seed):
    ref, p = REFERENCE["P4"], PATTERNS["P4"]
    s1, s2 = _lp(p)
    plan = synthesize(p, ref["k"], 1, seed=seed)
    tr = run(plan)
    bound, _ = converse_bound(p, ref["k"])
    return [
        Check("S*", ref["s_star"], s1.optimal_value),
        Check("S2*", ref["s_star"], s2.optimal_value),
        Check("y*", ref["y_star"], s1.optimal_vector),
        Check("L", ref["L"], plan.block_length),
        Check("codes", ref["codes"], tuple(plan.code_shapes.values())),
        Check("downloaded", ref["downloaded"], tr.downloaded),
        Check("decoded", True, tr.success),
        Check("rate", ref["rate"], measured_rate(tr)),
        Check("converse bound", ref["rate"], bound),
    ]


def _p5(seed):
    ref, p = REFERENCE["P5"], PATTERNS["P5"]
    _, s2 = _lp(p)
    x = ref["x_feasible"]
    b = incidence(p)
    feasible = all(sum(x[j] for j in range(p.n_sets) if b[i, j]) >= 1 for i in range(p.n_databases))
    g, gm = integerize(x)
    coll = build_collection(p, gm)
    trimmed, _ = delete_to_even(coll, g)
    return [
        Check("S2*", ref["s2"], s2.optimal_value),
        Check("sum of (1/2,...,1/2)", ref["s2"], sum(x)),
        Check("(1/2,...,1/2) feasible", True, feasible),
        Check("G", ref["g"], g),
        Check("even before trimming", None, even_property(coll)),
        Check("counts before trimming", (2, 2, 3, 2, 3), tuple(coll.counts())),
        Check("trimmed collection", ((1,), (2, 3), (3, 4), (1,), (2, 5), (4, 5)), trimmed.sets),
    ]


def _p6(seed):
    ref, p = REFERENCE["P6"], PATTERNS["P6"]
    _, s2 = _lp(p)
    g, gm = integerize(s2.optimal_vector)
    coll = build_collection(p, gm)
    steps, final = run_algorithm1(coll)
    n_full = sum(1 for s in final.sets if s == final.full)
    return [
        Check("S2*", ref["s2"], s2.optimal_value),
        Check("x*", ref["x_star"], s2.optimal_vector),
        Check("G", ref["g"], g),
        Check("G_m", ref["gm"], gm),
        Check("even property", ref["g"], even_property(coll)),
        Check("merge steps", ref["algorithm1_iterations"], len(steps)),
        Check("full / empty sets", (5, 4), (n_full, len(final) - n_full)),
        Check("bound at K=2", capacity_from_s(ref["s2"], 2), converse_bound(p, 2)[0]),
    ]


_RUNNERS = {"P1": _p1, "P2": _p2, "P3": _p3, "P4": _p4, "P5": _p5, "P6": _p6}


def run_examples(seed: int = 0) -> list[Row]:
    return [Row(name, tuple(fn(seed))) for name, fn in _RUNNERS.items()]


def render(rows: list[Row]) -> str:
    lines = []
    for row in rows:
        lines.append(f"{row.name}  {'PASS' if row.ok else 'FAIL'}")
        for c in row.checks:
            mark = "ok " if c.ok else "BAD"
            lines.append(f"  [{mark}] {c.label:<24} expected {_show(c.expected):<28} got {_show(c.actual)}")
    return "\n".join(lines)


def to_json(rows: list[Row]) -> list:
    return [
        {
            "example": r.name,
            "pass": r.ok,
            "checks": [
                {"label": c.label, "expected": _show(c.expected), "actual": _show(c.actual), "pass": c.ok}
                for c in r.checks
            ],
        }
        for r in rows
    ]
