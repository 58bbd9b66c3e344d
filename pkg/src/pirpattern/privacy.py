"""Privacy checks for a plan.

The algebraic check looks at everything a colluding set jointly sees. For
each message it takes the block of coefficients acting on that message and
requires the block to have the same number of independent rows, tau_m, for
every message, with tau_m <= L/S. It also requires that the rows of each
shared code picked by the set are linearly independent. Together these make
the view of a colluding set a uniformly random image of the messages that
does not depend on which message is wanted.

The empirical check histograms actual views at small scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gf
from .errors import GuardError, TooLarge
from .pattern import CollusionPattern
from .ratlp import fmt
from .scheme import SchemePlan, synthesize
from .sim import build_queries

VIEW_GUARD = 2**20


@dataclass(frozen=True)
class SetReport:
    colluding_set: tuple
    tau: Fraction
    row_counts: tuple
    ranks: tuple
    code_checks: tuple  # (message, class subset, rows picked, rank)
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class PrivacyReport:
    entries: tuple
    limit: Fraction

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def witnesses(self) -> list:
        return [e.colluding_set for e in self.entries if not e.ok]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "limit": fmt(self.limit),
            "sets": [
                {
                    "set": list(e.colluding_set),
                    "tau": fmt(e.tau),
                    "row_counts": list(e.row_counts),
                    "ranks": list(e.ranks),
                    "failures": list(e.failures),
                }
                for e in self.entries
            ],
            "witnesses": [list(w) for w in self.witnesses],
        }


def verify_rank_privacy(plan: SchemePlan, queries=None) -> PrivacyReport:
    queries = build_queries(plan) if queries is None else queries
    k, length, q = plan.k_messages, plan.block_length, plan.field
    limit = Fraction(length) / plan.s
    entries = []
    for t in plan.pattern.sets:
        seen = [queries[n - 1] for n in t]
        rows = np.vstack([qu.rows for qu in seen])
        labels = [lab for qu in seen for lab in qu.labels]
        tau = length * sum((plan.y[n - 1] for n in t), Fraction(0)) / plan.s
        failures = []
        if tau > limit:
            failures.append(f"tau {fmt(tau)} exceeds L/S = {fmt(limit)}")
        counts, ranks = [], []
        for m in range(1, k + 1):
            block = rows[:, (m - 1) * length : m * length]
            block = block[np.any(block != 0, axis=1)]
            counts.append(block.shape[0])
            ranks.append(gf.rank(block, q))
            if counts[-1] != tau:
                failures.append(f"message {m}: {counts[-1]} rows, expected {fmt(tau)}")
            if ranks[-1] != tau:
                failures.append(f"message {m}: rank {ranks[-1]}, expected {fmt(tau)}")
        code_checks = []
        for m in range(1, k + 1):
            if m == plan.theta:
                continue
            for kset, _ in plan.classes(m):
                j = len(kset)
                if j not in plan.code_shapes:
                    continue
                code = plan.codes[j]
                alpha = code.shape[1]
                joined = tuple(sorted(kset + (plan.theta,)))
                picked = [p for s, p in labels if s == kset]
                picked += [alpha + p for s, p in labels if s == joined]
                r = gf.rank(code[picked], q) if picked else 0
                code_checks.append((m, kset, len(picked), r))
                if len(picked) > alpha or r != len(picked):
                    failures.append(
                        f"message {m}, class {list(kset)}: {len(picked)} code rows of rank {r}, "
                        f"dimension {alpha}"
                    )
        entries.append(
            SetReport(
                colluding_set=t,
                tau=tau,
                row_counts=tuple(counts),
                ranks=tuple(ranks),
                code_checks=tuple(code_checks),
                failures=tuple(failures),
            )
        )
    return PrivacyReport(entries=tuple(entries), limit=limit)


# ---------------------------------------------------------------- empirical


@dataclass(frozen=True)
class EmpiricalResult:
    tv: dict  # colluding set -> total-variation distance
    trials: int
    field: int
    theta_a: int
    theta_b: int
    cells: dict = field(default_factory=dict)

    @property
    def max_tv(self) -> float:
        return max(self.tv.values())


def _view_maps(plan: SchemePlan):
    """For each colluding set, a list of (message, selector row) pairs.

    The value a colluding set sees for such a pair is
    ``selector_row @ U_message @ W_message``; rows of a k-sum query are kept
    apart per message, which is finer than what the databases see and so
    makes the test stricter.
    """
    out = {}
    for t in plan.pattern.sets:
        items = []
        for n in t:
            for kset in plan.subsets:
                a, b = plan.allocation[kset][n - 1]
                for m in kset:
                    sel = plan.selector(kset, m)
                    for p in range(a, b):
                        items.append((m, sel[p]))
        out[t] = items
    return out


def _views(plan: SchemePlan, items, mix: list, msgs: np.ndarray) -> np.ndarray:
    """Encoded views for a batch of trials, shape (trials, len(items))."""
    q = plan.field
    uw = [np.einsum("tij,j->ti", u, w) % q for u, w in zip(mix, msgs)]
    cols = [(uw[m - 1] @ row) % q for m, row in items]
    return np.stack(cols, axis=1) if cols else np.zeros((mix[0].shape[0], 0), dtype=np.int64)


def _histogram(codes: np.ndarray) -> dict:
    keys, counts = np.unique(codes, return_counts=True)
    return dict(zip(keys.tolist(), counts.tolist()))


def _tv(h1: dict, h2: dict, n1: int, n2: int) -> float:
    keys = set(h1) | set(h2)
    return 0.5 * sum(abs(h1.get(x, 0) / n1 - h2.get(x, 0) / n2) for x in keys)


def empirical_indistinguishability(
    pattern: CollusionPattern,
    k: int,
    theta_a: int,
    theta_b: int,
    q: int | None,
    trials: int,
    seed: int,
    y=None,
    leak_desired: bool = False,
) -> EmpiricalResult:
    """Total-variation distance between what each colluding set sees when
    message ``theta_a`` versus ``theta_b`` is retrieved.

    Every trial draws fresh mixing matrices; messages are fixed and drawn once
    from ``seed``. ``leak_desired`` replaces U_theta by the identity, which
    breaks privacy on purpose.
    """
    if trials < 1:
        raise GuardError("at least one trial is needed")
    plans = [synthesize(pattern, k, th, seed=seed, y=y, field=q) for th in (theta_a, theta_b)]
    q = plans[0].field
    length = plans[0].block_length
    rng = np.random.default_rng([seed, 0xE1])
    msgs = rng.integers(1, q, size=(k, length), dtype=np.int64)
    result = {}
    cells = {}
    hists = []
    for idx, plan in enumerate(plans):
        maps = _view_maps(plan)
        for t, items in maps.items():
            width = len(items)
            if q ** width > VIEW_GUARD:
                raise TooLarge(f"view of set {list(t)} has {q}^{width} outcomes")
        trial_rng = np.random.default_rng([seed, idx, 0x7A1])
        mix = [gf.random_full_rank_batch(trials, length, q, trial_rng) for _ in range(k)]
        if leak_desired:
            mix[plan.theta - 1] = np.broadcast_to(np.eye(length, dtype=np.int64), mix[0].shape)
        per_set = {}
        for t, items in maps.items():
            views = _views(plan, items, mix, msgs)
            weights = q ** np.arange(views.shape[1], dtype=np.int64)
            per_set[t] = _histogram(views @ weights)
        hists.append(per_set)
    for t in pattern.sets:
        result[t] = _tv(hists[0][t], hists[1][t], trials, trials)
        cells[t] = len(set(hists[0][t]) | set(hists[1][t]))
    return EmpiricalResult(
        tv=result, trials=trials, field=q, theta_a=theta_a, theta_b=theta_b, cells=cells
    )
