from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pirpattern.catalog import P1, P2, P4
from pirpattern.errors import GuardError, TooLarge
from pirpattern.pattern import CollusionPattern, generate
from pirpattern.privacy import empirical_indistinguishability, verify_rank_privacy
from pirpattern.scheme import synthesize

from conftest import patterns

BAD_Y = (F(1, 3), F(1, 3), F(1, 3), F(4, 3), F(1))


def test_p1_view_ranks():
    for theta in (1, 2):
        rep = verify_rank_privacy(synthesize(P1, 2, theta, seed=theta))
        assert rep.passed and rep.limit == 24
        assert all(e.ranks == (24, 24) and e.tau == 24 for e in rep.entries)


def test_p4_passes_with_expected_tau():
    rep = verify_rank_privacy(synthesize(P4, 3, 2, seed=1))
    assert rep.passed and rep.limit == 196
    # {1,2,3} sees 3/4 of the L/S budget, the other sets all of it
    assert [e.tau for e in rep.entries] == [147, 196, 196, 196, 196, 196, 196]


def test_p2_unqueried_databases():
    rep = verify_rank_privacy(synthesize(P2, 2, 1))
    assert rep.passed
    assert [e.tau for e in rep.entries] == [2, 2, 2, 2, 2, 2, 0]


def test_negative_control_is_caught():
    plan = synthesize(P1, 2, 1, y=BAD_Y, check_feasible=False)
    rep = verify_rank_privacy(plan)
    assert not rep.passed
    assert rep.witnesses == [(1, 4), (2, 4), (3, 4)]
    assert "exceeds" in rep.entries[1].failures[0]


def test_report_json():
    obj = verify_rank_privacy(synthesize(P1, 2, 1)).to_json()
    assert obj["passed"] and obj["limit"] == "24" and obj["witnesses"] == []
    assert obj["sets"][0] == {"set": [1, 2, 3], "tau": "24", "row_counts": [24, 24], "ranks": [24, 24], "failures": []}


@settings(max_examples=25)
@given(patterns(n_max=5, m_max=5), st.integers(1, 3), st.integers(0, 99), st.data())
def test_rank_privacy_random_plans(p, k, seed, data):
    plan = synthesize(p, k, data.draw(st.integers(1, k)), seed=seed)
    if plan.block_length > 300:
        return
    assert verify_rank_privacy(plan).passed


def test_rank_privacy_seed_invariant():
    reports = [verify_rank_privacy(synthesize(P1, 2, 2, seed=s)) for s in range(5)]
    assert len({tuple((e.row_counts, e.ranks) for e in r.entries) for r in reports}) == 1


def test_empirical_non_colluding():
    res = empirical_indistinguishability(generate("non_colluding", 2), 2, 1, 2, 2, 100_000, seed=0)
    assert res.field == 2 and res.trials == 100_000
    assert res.max_tv < 0.02


def test_empirical_leak_control():
    p = CollusionPattern(2, ((1, 2),))
    y = (F(1, 2), F(1, 2))
    clean = empirical_indistinguishability(p, 2, 1, 2, 3, 20_000, seed=1, y=y)
    leak = empirical_indistinguishability(p, 2, 1, 2, 3, 20_000, seed=1, y=y, leak_desired=True)
    assert clean.max_tv < 0.05
    assert leak.max_tv > 0.1


def test_empirical_deterministic():
    args = (generate("non_colluding", 2), 2, 1, 2, 2, 2000)
    a = empirical_indistinguishability(*args, seed=3)
    b = empirical_indistinguishability(*args, seed=3)
    assert a.tv == b.tv


def test_empirical_guards():
    with pytest.raises(GuardError):
        empirical_indistinguishability(generate("non_colluding", 2), 2, 1, 2, 2, 0, seed=0)
    with pytest.raises(TooLarge):
        empirical_indistinguishability(P1, 2, 1, 2, None, 10, seed=0)
