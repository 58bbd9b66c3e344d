"""Replayable certificates for the upper bound on capacity.

A feasible x of LP2 (B x >= 1, x >= 0) is written as x_m = G_m / G. Taking
G_m copies of every colluding set gives a collection in which each database
appears at least G times; trimming surplus occurrences makes every database
appear exactly G times. Repeatedly replacing a pair of incomparable sets by
their union and intersection keeps those counts and ends at G copies of the
full set plus empty sets. Each replacement is a sub-modularity step on the
answer entropies, so the chain bounds capacity by the formula evaluated at
sum(x). A certificate records every step so it can be checked without an LP
solver.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .capacity import capacity_from_s
from .errors import (
    BadParams,
    InternalInvariantBroken,
    NegativeEntry,
    Undercounted,
)
from .pattern import CollusionPattern, incidence, pattern_from_json
from .ratlp import build_lp2, fmt, parse_fraction, solve

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SubscriptCollection:
    """Ordered multiset of subsets of ``1..n_databases``."""

    n_databases: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(tuple(sorted(int(i) for i in s)) for s in self.sets)
        for s in sets:
            if s and (s[0] < 1 or s[-1] > self.n_databases or len(set(s)) != len(s)):
                raise BadParams(f"{list(s)} is not a subset of [1:{self.n_databases}]")
        object.__setattr__(self, "sets", sets)

    def __len__(self):
        return len(self.sets)

    def counts(self) -> list[int]:
        c = Counter(i for s in self.sets for i in s)
        return [c[n] for n in range(1, self.n_databases + 1)]

    @property
    def full(self) -> tuple:
        return tuple(range(1, self.n_databases + 1))

    def replace(self, pos: int, new) -> "SubscriptCollection":
        sets = list(self.sets)
        sets[pos] = tuple(sorted(new))
        return SubscriptCollection(self.n_databases, tuple(sets))


@dataclass(frozen=True)
class Step:
    a1_pos: int  # 0-based
    a2_pos: int
    union: tuple
    intersection: tuple


@dataclass(frozen=True)
class Certificate:
    pattern: CollusionPattern
    x: tuple
    g: int
    gm: tuple
    deletions: tuple  # (position, index), position 0-based
    steps: tuple
    final: SubscriptCollection
    k_messages: int
    bound: Fraction

    def to_json(self) -> dict:
        n_full = sum(1 for s in self.final.sets if s == self.final.full)
        return {
            "format_version": FORMAT_VERSION,
            "pattern": self.pattern.to_json(),
            "k": self.k_messages,
            "x": [fmt(v) for v in self.x],
            "g": self.g,
            "gm": list(self.gm),
            "deletions": [{"set_pos": p + 1, "index": i} for p, i in self.deletions],
            "steps": [{"a1_pos": s.a1_pos + 1, "a2_pos": s.a2_pos + 1} for s in self.steps],
            "final": [list(s) for s in self.final.sets],
            "final_counts": {"full": n_full, "empty": len(self.final) - n_full},
            "bound": fmt(self.bound),
        }


def certificate_from_json(obj: dict) -> Certificate:
    if obj.get("format_version") != FORMAT_VERSION:
        raise BadParams(f"unsupported certificate format_version {obj.get('format_version')!r}")
    p = pattern_from_json(obj["pattern"])
    # union/intersection are recomputed during replay; store placeholders
    steps = tuple(Step(s["a1_pos"] - 1, s["a2_pos"] - 1, (), ()) for s in obj["steps"])
    return Certificate(
        pattern=p,
        x=tuple(parse_fraction(v) for v in obj["x"]),
        g=int(obj["g"]),
        gm=tuple(int(v) for v in obj["gm"]),
        deletions=tuple((d["set_pos"] - 1, int(d["index"])) for d in obj["deletions"]),
        steps=steps,
        final=SubscriptCollection(p.n_databases, tuple(tuple(s) for s in obj["final"])),
        k_messages=int(obj["k"]),
        bound=parse_fraction(obj["bound"]),
    )


def load_certificate(path) -> Certificate:
    return certificate_from_json(json.loads(Path(path).read_text()))


def dump_certificate(cert: Certificate, path) -> None:
    Path(path).write_text(json.dumps(cert.to_json()) + "\n")


# ------------------------------------------------------------------ building


def integerize(x) -> tuple[int, tuple[int, ...]]:
    """Smallest G with every G * x_m an integer, and those integers."""
    x = [Fraction(v) for v in x]
    if any(v < 0 for v in x):
        raise NegativeEntry("x must be non-negative")
    g = math.lcm(*(v.denominator for v in x)) if x else 1
    return g, tuple(int(v * g) for v in x)


def build_collection(pattern: CollusionPattern, gm) -> SubscriptCollection:
    if len(gm) != pattern.n_sets:
        raise BadParams(f"{len(gm)} weights for {pattern.n_sets} sets")
    sets = []
    for t, c in zip(pattern.sets, gm):
        sets.extend([t] * int(c))
    return SubscriptCollection(pattern.n_databases, tuple(sets))


def even_property(c: SubscriptCollection) -> int | None:
    """G if every database appears exactly G > 0 times, else None."""
    counts = c.counts()
    if counts and counts[0] > 0 and all(v == counts[0] for v in counts):
        return counts[0]
    return None


def delete_to_even(c: SubscriptCollection, g: int):
    """Remove surplus occurrences, earliest sets first.

    Returns the trimmed collection and the list of (position, index) removals.
    """
    counts = c.counts()
    short = [n + 1 for n, v in enumerate(counts) if v < g]
    if short:
        raise Undercounted(f"databases {short} appear fewer than {g} times")
    surplus = {n + 1: v - g for n, v in enumerate(counts)}
    sets = [list(s) for s in c.sets]
    deletions = []
    for pos, s in enumerate(sets):
        for i in list(s):
            if surplus[i] > 0:
                s.remove(i)
                surplus[i] -= 1
                deletions.append((pos, i))
    return SubscriptCollection(c.n_databases, tuple(tuple(s) for s in sets)), tuple(deletions)


def run_algorithm1(c: SubscriptCollection) -> tuple[tuple[Step, ...], SubscriptCollection]:
    """Merge incomparable pairs until only full and empty sets remain.

    a1 is the first set (by position) that no other non-trivial set strictly
    contains, and it is kept until it grows to the full set. a2 is the first
    non-trivial set that is not a subset of a1.
    """
    g = even_property(c)
    if g is None:
        raise BadParams("collection does not have the even property")
    full = frozenset(c.full)
    sets = [frozenset(s) for s in c.sets]
    limit = (c.n_databases - 1) * len(sets)
    steps = []
    a1 = None
    while True:
        live = [i for i, s in enumerate(sets) if s and s != full]
        if not live:
            break
        if a1 is None or a1 not in live:
            a1 = next(i for i in live if not any(sets[i] < sets[j] for j in live))
        a2 = next((i for i in live if i != a1 and not sets[i] <= sets[a1]), None)
        if a2 is None:
            raise InternalInvariantBroken(
                f"no set outside {sorted(sets[a1])} remains although the collection is not final"
            )
        u, v = sets[a1] | sets[a2], sets[a1] & sets[a2]
        sets[a1], sets[a2] = u, v
        steps.append(Step(a1, a2, tuple(sorted(u)), tuple(sorted(v))))
        if len(steps) > limit:
            raise InternalInvariantBroken(f"more than {limit} steps")
    final = SubscriptCollection(c.n_databases, tuple(tuple(sorted(s)) for s in sets))
    n_full = sum(1 for s in sets if s == full)
    if n_full != g:
        raise InternalInvariantBroken(f"ended with {n_full} full sets, expected {g}")
    return tuple(steps), final


def certify(pattern: CollusionPattern, k: int, x) -> Certificate:
    x = tuple(Fraction(v) for v in x)
    g, gm = integerize(x)
    coll = build_collection(pattern, gm)
    if len(coll) == 0:
        raise BadParams("x is zero, so the collection is empty")
    trimmed, deletions = delete_to_even(coll, g)
    steps, final = run_algorithm1(trimmed)
    return Certificate(
        pattern=pattern,
        x=x,
        g=g,
        gm=gm,
        deletions=deletions,
        steps=steps,
        final=final,
        k_messages=k,
        bound=capacity_from_s(sum(x), k),
    )


# ------------------------------------------------------------------ checking


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failed_check: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def _fail(check, detail):
    return Verdict(False, check, detail)


def verify_certificate(cert: Certificate, pattern: CollusionPattern | None = None) -> Verdict:
    """Replay a certificate from scratch and report the first failing check."""
    p = cert.pattern if pattern is None else pattern
    n, m = p.n_databases, p.n_sets
    x = cert.x
    if len(x) != m:
        return _fail("x_shape", f"x has {len(x)} entries for {m} sets")
    if any(v < 0 for v in x):
        return _fail("x_feasible", "x has a negative entry")
    b = incidence(p)
    for i in range(n):
        cover = sum((x[j] for j in range(m) if b[i, j]), Fraction(0))
        if cover < 1:
            return _fail("x_feasible", f"database {i + 1} is covered {cover} < 1")
    if cert.g < 1 or len(cert.gm) != m:
        return _fail("integerize", "bad G or weight count")
    for j in range(m):
        if cert.gm[j] < 0 or Fraction(cert.gm[j], cert.g) != x[j]:
            return _fail("integerize", f"x_{j + 1} = {x[j]} is not {cert.gm[j]}/{cert.g}")

    coll = build_collection(p, cert.gm)
    v_total = len(coll)
    if v_total == 0:
        return _fail("collection", "empty collection")
    sets = [set(s) for s in coll.sets]
    for pos, idx in cert.deletions:
        if not 0 <= pos < v_total or idx not in sets[pos]:
            return _fail("deletion", f"index {idx} is not in set at position {pos + 1}")
        sets[pos].discard(idx)
    trimmed = SubscriptCollection(n, tuple(tuple(s) for s in sets))
    if even_property(trimmed) != cert.g:
        return _fail("deletion", f"after deletions the counts are {trimmed.counts()}, not all {cert.g}")

    counts = trimmed.counts()
    for t, st in enumerate(cert.steps):
        i, j = st.a1_pos, st.a2_pos
        if not (0 <= i < v_total and 0 <= j < v_total) or i == j:
            return _fail("step", f"step {t + 1}: bad positions")
        a1, a2 = sets[i], sets[j]
        if a1 <= a2 or a2 <= a1:
            return _fail("step", f"step {t + 1}: {sorted(a1)} and {sorted(a2)} are nested")
        sets[i], sets[j] = a1 | a2, a1 & a2
        now = SubscriptCollection(n, tuple(tuple(s) for s in sets)).counts()
        if now != counts:
            return _fail("step", f"step {t + 1}: per-database counts changed")

    full = set(range(1, n + 1))
    n_full = sum(1 for s in sets if s == full)
    n_empty = sum(1 for s in sets if not s)
    if n_full != cert.g or n_empty != v_total - cert.g:
        return _fail("final", f"{n_full} full and {n_empty} empty sets, expected {cert.g} and {v_total - cert.g}")
    replayed = tuple(tuple(sorted(s)) for s in sets)
    if replayed != cert.final.sets:
        return _fail("final", "recorded final collection differs from the replay")
    if len(cert.steps) > (n - 1) * v_total:
        return _fail("step_bound", f"{len(cert.steps)} steps exceed {(n - 1) * v_total}")
    expected = capacity_from_s(sum(x, Fraction(0)), cert.k_messages)
    if cert.bound != expected:
        return _fail("bound", f"bound {cert.bound} differs from {expected}")
    return Verdict(True)


def converse_bound(pattern: CollusionPattern, k: int, x=None) -> tuple[Fraction, Certificate]:
    """Upper bound on capacity with a verified certificate.

    ``x`` defaults to the LP2 optimum; any feasible x gives a valid, possibly
    looser, bound.
    """
    if x is None:
        x = solve(build_lp2(incidence(pattern))).optimal_vector
    cert = certify(pattern, k, x)
    verdict = verify_certificate(cert)
    if not verdict:
        raise InternalInvariantBroken(f"generated certificate fails: {verdict.failed_check}: {verdict.detail}")
    return cert.bound, cert
