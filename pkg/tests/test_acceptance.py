"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import time
from fractions import Fraction as F

import numpy as np
import pytest

from pirpattern.errors import TooLarge
from pirpattern.capacity import capacity_of_pattern, closed_form
from pirpattern.catalog import P1, P2, P3, P4, P5, P6, PATTERNS, REFERENCE
from pirpattern.converse import (
    build_collection,
    converse_bound,
    delete_to_even,
    even_property,
    integerize,
    run_algorithm1,
    verify_certificate,
)
from pirpattern.pattern import CollusionPattern, generate, incidence, random_pattern
from pirpattern.privacy import empirical_indistinguishability, verify_rank_privacy
from pirpattern.ratlp import build_lp1, build_lp2, check_duality, enumerate_vertices, solve
from pirpattern.scheme import synthesize
from pirpattern.sim import measured_rate, run

# plans above this block length are checked at plan level only (see README)
SIM_LIMIT = 400


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return emit


def closed_form_instances():
    out = []
    for n in range(1, 9):
        for k in range(1, 6):
            out.append(("non_colluding", (n,), k))
            for t in range(1, n + 1):
                out.append(("t_colluding", (n, t), k))
                out.append(("cyclic", (n, t), k))
    rng = np.random.default_rng(20240)
    for _ in range(50):
        blocks, total = [], 0
        for _ in range(int(rng.integers(1, 4))):
            n = int(rng.integers(1, 9 - total)) if total < 8 else 0
            if n == 0:
                break
            blocks.append((n, int(rng.integers(1, n + 1))))
            total += n
        out.append(("disjoint", (blocks,), int(rng.integers(1, 6))))
    return out


INSTANCES = closed_form_instances()


def golden_patterns():
    return [PATTERNS[name] for name in ("P1", "P2", "P3", "P4", "P5", "P6")]


def duality_patterns():
    rng = np.random.default_rng(1000)
    return [random_pattern(rng, n_max=8, m_max=10) for _ in range(1000)]


# ----------------------------------------------------------------- 1


def test_criterion_1_lp_golden_values(report):
    start = time.perf_counter()
    checks = []
    s1, s2 = solve(build_lp1(incidence(P1))), solve(build_lp2(incidence(P1)))
    checks += [
        s1.optimal_value == s2.optimal_value == F(8, 3),
        s1.optimal_vector == REFERENCE["P1"]["y_star"],
        s2.optimal_vector == REFERENCE["P1"]["x_star"],
    ]
    for p, v in ((P2, 2), (P3, 2), (P4, F(7, 4))):
        b = incidence(p)
        checks.append(solve(build_lp1(b)).optimal_value == solve(build_lp2(b)).optimal_value == v)
    lp2 = build_lp2(incidence(P5))
    checks += [solve(lp2).optimal_value == 3, lp2.is_feasible((F(1, 2),) * 6), lp2.value((F(1, 2),) * 6) == 3]
    checks.append(solve(build_lp2(incidence(P6))).optimal_vector == (F(1, 5), F(3, 5), F(1, 5), F(2, 5), F(2, 5), 0))
    elapsed = time.perf_counter() - start
    ok = all(checks) and elapsed < 1
    report(1, ok, f"{sum(checks)}/{len(checks)} golden values exact, {elapsed:.2f}s")
    assert ok


# ----------------------------------------------------------------- 2


def test_criterion_2_duality(report):
    start = time.perf_counter()
    agree, oracle_checked = 0, 0
    pats = duality_patterns()
    for p in pats:
        lp1, lp2 = build_lp1(incidence(p)), build_lp2(incidence(p))
        s1, s2 = solve(lp1), solve(lp2)
        if not check_duality(s1, s2):
            continue
        try:
            best1 = max(lp1.value(v) for v in enumerate_vertices(lp1))
            best2 = min(lp2.value(v) for v in enumerate_vertices(lp2))
        except TooLarge:
            agree += 1
            continue
        oracle_checked += 1
        if best1 == s1.optimal_value and best2 == s2.optimal_value:
            agree += 1
    elapsed = time.perf_counter() - start
    ok = agree == len(pats) and elapsed < 60
    report(2, ok, f"{agree}/{len(pats)} patterns with LP1 = LP2, {oracle_checked} also matched the vertex oracle, {elapsed:.1f}s")
    assert ok


# ----------------------------------------------------------------- 3


def test_criterion_3_closed_forms(report):
    bad = []
    for kind, args, k in INSTANCES:
        got = capacity_of_pattern(generate(kind, *args), k).capacity
        if got != closed_form(kind, args[0] if len(args) == 1 else args, k):
            bad.append((kind, args, k))
    ok = not bad
    report(3, ok, f"{len(INSTANCES) - len(bad)}/{len(INSTANCES)} instances equal their closed form")
    assert ok, bad


# ----------------------------------------------------------------- 4


def test_criterion_4_achievability(report):
    start = time.perf_counter()
    p4 = [run(synthesize(P4, 3, theta, seed=seed)) for theta in (1, 2, 3) for seed in range(20)]
    p1 = run(synthesize(P1, 2, 1, seed=0))
    p2 = run(synthesize(P2, 2, 1, seed=0))
    elapsed = time.perf_counter() - start
    checks = [
        all(t.success and t.downloaded == 651 and measured_rate(t) == F(49, 93) for t in p4),
        p1.success and p1.plan.block_length == 64 and measured_rate(p1) == F(8, 11),
        [a.symbols.size for a in p1.answers] == [11, 11, 11, 22, 33],
        p2.success and p2.plan.block_length == 4 and measured_rate(p2) == F(2, 3),
        [a.symbols.size for a in p2.answers] == [3, 3, 0, 0, 0],
    ]
    ok = all(checks) and elapsed < 30
    report(4, ok, f"{sum(t.success for t in p4)}/60 P4 retrievals exact at rate 49/93, P1 8/11, P2 2/3, {elapsed:.1f}s")
    assert ok


# ----------------------------------------------------------------- 5 and 8 share plans


@pytest.fixture(scope="module")
def equality_runs():
    """Every pattern of criteria 1-3 at K=2, plus each criterion-3 instance small
    enough to simulate, run end to end with its converse certificate."""
    items = [(p, 2) for p in golden_patterns()] + [(p, 2) for p in duality_patterns()]
    seen = set()
    for kind, args, k in INSTANCES:
        p = generate(kind, *args)
        if (p.n_databases, p.sets) not in seen:
            seen.add((p.n_databases, p.sets))
            items.append((p, 2))
        items.append((p, k))
    return items


def test_criterion_5_rank_privacy(report):
    plans = [synthesize(P4, 3, th, seed=s) for th in (1, 2, 3) for s in range(3)]
    plans += [synthesize(P1, 2, 1), synthesize(P2, 2, 1)]
    skipped = 0
    for kind, args, k in INSTANCES:
        plan = synthesize(generate(kind, *args), k, 1 + k // 2, seed=k)
        if plan.block_length <= SIM_LIMIT:
            plans.append(plan)
        else:
            skipped += 1
    failing = [p for p in plans if not verify_rank_privacy(p).passed]
    p1_ranks = {r for e in verify_rank_privacy(synthesize(P1, 2, 2, seed=9)).entries for r in e.ranks}
    control = synthesize(P1, 2, 1, y=(F(1, 3), F(1, 3), F(1, 3), F(4, 3), F(1)), check_feasible=False)
    control_rep = verify_rank_privacy(control)
    ok = not failing and p1_ranks == {24} and not control_rep.passed
    report(
        5,
        ok,
        f"{len(plans) - len(failing)}/{len(plans)} plans pass ({skipped} with L > {SIM_LIMIT} not materialized), "
        f"P1 view ranks {sorted(p1_ranks)}, negative control caught at {control_rep.witnesses}",
    )
    assert ok


# ----------------------------------------------------------------- 6


def test_criterion_6_empirical_privacy(report):
    start = time.perf_counter()
    nc2 = generate("non_colluding", 2)
    res = empirical_indistinguishability(nc2, 2, 1, 2, 2, 100_000, seed=0)
    # controls: the desired message left unmixed, here and under full collusion
    leak = empirical_indistinguishability(nc2, 2, 1, 2, 2, 100_000, seed=0, leak_desired=True)
    full = CollusionPattern(2, ((1, 2),))
    half = (F(1, 2), F(1, 2))
    leak_full = empirical_indistinguishability(full, 2, 1, 2, 2, 100_000, seed=0, y=half, leak_desired=True)
    elapsed = time.perf_counter() - start
    plan = synthesize(nc2, 2, 1, field=2)
    ok = (
        plan.block_length == 4
        and res.max_tv < 0.02
        and leak.max_tv > 0.1
        and leak_full.max_tv > 0.1
        and elapsed < 120
    )
    report(
        6,
        ok,
        f"max TV {res.max_tv:.4f} (< 0.02); leaking controls {leak.max_tv:.3f} and "
        f"{leak_full.max_tv:.3f} under full collusion (> 0.1); {elapsed:.1f}s",
    )
    assert ok


# ----------------------------------------------------------------- 7


def test_criterion_7_converse_certificates(report):
    g, gm = integerize(REFERENCE["P6"]["x_star"])
    coll = build_collection(P6, gm)
    steps, final = run_algorithm1(coll)
    n_full = final.sets.count((1, 2, 3, 4, 5))
    p6_ok = n_full == 5 and final.sets.count(()) == 4 and len(steps) <= 36

    p5 = build_collection(P5, integerize(REFERENCE["P5"]["x_feasible"])[1])
    trimmed, _ = delete_to_even(p5, 2)
    p5_ok = even_property(trimmed) == 2

    certs = [converse_bound(p, k)[1] for p in golden_patterns() for k in (1, 2, 3)]
    certs.append(converse_bound(P5, 2, x=REFERENCE["P5"]["x_feasible"])[1])
    certs.append(converse_bound(P2, 2, x=REFERENCE["P2"]["x_star"])[1])
    accepted = sum(bool(verify_certificate(c)) for c in certs)

    import dataclasses

    p6 = converse_bound(P6, 2)[1]
    p5c = certs[-2]
    mutants = {
        "step": dataclasses.replace(p6, steps=p6.steps[:1] + p6.steps),
        "deletion": dataclasses.replace(p5c, deletions=((p5c.deletions[0][0], 4),) + p5c.deletions[1:]),
        "final": dataclasses.replace(p6, steps=p6.steps[:-1]),
    }
    rejected = {name: verify_certificate(c).failed_check for name, c in mutants.items()}
    mut_ok = all(rejected[name] == name for name in mutants)

    ok = p6_ok and p5_ok and accepted == len(certs) and mut_ok
    report(
        7,
        ok,
        f"P6 reaches {n_full} full + {final.sets.count(())} empty in {len(steps)} steps (limit 36); "
        f"P5 trimmed even with G=2: {p5_ok}; {accepted}/{len(certs)} certificates accepted; "
        f"mutants rejected at {rejected}",
    )
    assert ok


# ----------------------------------------------------------------- 8


def test_criterion_8_capacity_equality(report, equality_runs):
    simulated, plan_level, bad = 0, 0, []
    for p, k in equality_runs:
        bound, cert = converse_bound(p, k)
        if not verify_certificate(cert):
            bad.append((p, k, "certificate"))
            continue
        plan = synthesize(p, k, 1, seed=k)
        if plan.block_length <= SIM_LIMIT:
            tr = run(plan)
            rate = measured_rate(tr) if tr.success else None
            simulated += 1
        else:
            # too large to materialize: count the downloads the allocation prescribes
            rate = F(plan.block_length, sum(plan.rows_per_database()))
            plan_level += 1
        if rate != bound:
            bad.append((p, k, rate, bound))
    ok = not bad
    report(
        8,
        ok,
        f"{len(equality_runs) - len(bad)}/{len(equality_runs)} (pattern, K) pairs with rate = converse bound; "
        f"{simulated} simulated end to end, {plan_level} with L > {SIM_LIMIT} checked from the allocation",
    )
    assert ok, bad[:5]
