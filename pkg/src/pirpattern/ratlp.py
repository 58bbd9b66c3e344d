"""Exact linear programming over the rationals.

A dense two-phase simplex on ``fractions.Fraction`` with Bland's rule. Ties
between optimal vertices are broken towards the lexicographically smallest
optimal point by carrying the objectives ``-x_1, -x_2, ...`` as
infinitesimally weighted tie-breakers alongside the real objective.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import StatusMismatch, TooLarge

LE, GE, EQ = "<=", ">=", "="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _frac_vec(v):
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class LpProblem:
    """``sense`` c.x subject to A x (row_sense) b, x >= 0."""

    sense: str
    c: tuple
    a: tuple
    b: tuple
    row_sense: tuple
    name: str = ""

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        object.__setattr__(self, "c", _frac_vec(self.c))
        object.__setattr__(self, "a", tuple(_frac_vec(r) for r in self.a))
        object.__setattr__(self, "b", _frac_vec(self.b))
        rs = tuple(self.row_sense)
        object.__setattr__(self, "row_sense", rs)
        n = len(self.c)
        if len(self.a) != len(self.b) or len(rs) != len(self.b):
            raise ValueError("constraint matrix, rhs and row senses disagree in length")
        if any(len(r) != n for r in self.a):
            raise ValueError("constraint rows must have one entry per variable")
        if any(s not in (LE, GE, EQ) for s in rs):
            raise ValueError(f"bad row sense in {rs}")

    @property
    def n_vars(self) -> int:
        return len(self.c)

    @property
    def n_rows(self) -> int:
        return len(self.b)

    def is_feasible(self, x) -> bool:
        """Exact feasibility test of a candidate point."""
        if len(x) != self.n_vars or any(v < 0 for v in x):
            return False
        for row, rhs, s in zip(self.a, self.b, self.row_sense):
            lhs = sum(ai * xi for ai, xi in zip(row, x))
            if (s == LE and lhs > rhs) or (s == GE and lhs < rhs) or (s == EQ and lhs != rhs):
                return False
        return True

    def value(self, x) -> Fraction:
        return sum((ci * xi for ci, xi in zip(self.c, x)), Fraction(0))


@dataclass(frozen=True)
class LpSolution:
    status: str
    optimal_vector: tuple | None = None
    optimal_value: Fraction | None = None
    problem: LpProblem | None = None


def build_lp1(b) -> LpProblem:
    """max 1.y subject to B^T y <= 1, y >= 0."""
    b = np.asarray(b)
    n, m = b.shape
    return LpProblem(
        "max",
        [1] * n,
        [[int(b[i, j]) for i in range(n)] for j in range(m)],
        [1] * m,
        [LE] * m,
        name="LP1",
    )


def build_lp2(b) -> LpProblem:
    """min 1.x subject to B x >= 1, x >= 0."""
    b = np.asarray(b)
    n, m = b.shape
    return LpProblem(
        "min",
        [1] * m,
        [[int(b[i, j]) for j in range(m)] for i in range(n)],
        [1] * n,
        [GE] * n,
        name="LP2",
    )


class _Tableau:
    """Dense simplex tableau. Row i: sum_j t[i][j] x_j = rhs[i]."""

    def __init__(self, rows, rhs, basis):
        self.t = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, c):
        t, rhs = self.t, self.rhs
        piv = t[r][c]
        row = [v / piv for v in t[r]]
        t[r] = row
        rhs[r] = rhs[r] / piv
        for i in range(len(t)):
            if i != r:
                f = t[i][c]
                if f:
                    ti = t[i]
                    t[i] = [a - f * b_ for a, b_ in zip(ti, row)]
                    rhs[i] -= f * rhs[r]
        self.basis[r] = c

    def reduced_costs(self, obj, active):
        """d = c - c_B B^-1 A for one objective row."""
        d = list(obj)
        for i, bv in enumerate(self.basis):
            cb = obj[bv]
            if cb:
                ti = self.t[i]
                for j in active:
                    if ti[j]:
                        d[j] -= cb * ti[j]
        return d

    def run(self, obj, active, tie_vars=()):
        """Maximize ``obj`` with Bland's rule; return OPTIMAL or UNBOUNDED.

        ``tie_vars`` lists variables whose negation acts as infinitesimal
        secondary objectives, in decreasing weight. The reduced cost of
        column j for objective ``-x_k`` is ``-[j == k] + t[row(k)][j]``.
        """
        while True:
            d = self.reduced_costs(obj, active)
            row_of = {bv: i for i, bv in enumerate(self.basis)}
            enter = None
            for j in active:
                if j in row_of:
                    continue
                if d[j] > 0:
                    enter = j
                elif d[j] == 0:
                    for k in tie_vars:
                        dk = Fraction(-1) if j == k else Fraction(0)
                        if k in row_of:
                            dk += self.t[row_of[k]][j]
                        if dk > 0:
                            enter = j
                        if dk != 0:
                            break
                if enter is not None:
                    break
            if enter is None:
                return OPTIMAL
            best = None
            for i, ti in enumerate(self.t):
                a = ti[enter]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)


def solve(p: LpProblem) -> LpSolution:
    """Exact optimum of ``p``; the lexicographically smallest optimal vertex."""
    n = p.n_vars
    rows, rhs, senses = [], [], []
    for r, b_, s in zip(p.a, p.b, p.row_sense):
        r = list(r)
        if b_ < 0:
            r = [-v for v in r]
            b_ = -b_
            s = {LE: GE, GE: LE, EQ: EQ}[s]
        rows.append(r)
        rhs.append(b_)
        senses.append(s)
    m = len(rows)

    n_slack = sum(1 for s in senses if s != EQ)
    n_art = sum(1 for s in senses if s != LE)
    width = n + n_slack + n_art
    t = []
    basis = []
    slack_col = n
    art_col = n + n_slack
    art_cols = []
    for r, s in zip(rows, senses):
        row = r + [Fraction(0)] * (width - n)
        if s == LE:
            row[slack_col] = Fraction(1)
            basis.append(slack_col)
            slack_col += 1
        else:
            if s == GE:
                row[slack_col] = Fraction(-1)
                slack_col += 1
            row[art_col] = Fraction(1)
            basis.append(art_col)
            art_cols.append(art_col)
            art_col += 1
        t.append(row)
    tab = _Tableau(t, list(rhs), basis)

    if art_cols:
        phase1 = [Fraction(0)] * width
        for j in art_cols:
            phase1[j] = Fraction(-1)
        tab.run(phase1, list(range(width)))
        infeas = sum((tab.rhs[i] for i, bv in enumerate(tab.basis) if bv in art_cols), Fraction(0))
        if infeas > 0:
            return LpSolution(INFEASIBLE, problem=p)
        # drive zero-level artificials out of the basis; drop redundant rows
        art_set = set(art_cols)
        i = 0
        while i < len(tab.t):
            if tab.basis[i] in art_set:
                col = next((j for j in range(n + n_slack) if tab.t[i][j] != 0), None)
                if col is None:
                    del tab.t[i], tab.rhs[i], tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1
        tab.t = [row[: n + n_slack] for row in tab.t]
        width = n + n_slack

    sign = 1 if p.sense == "max" else -1
    primary = [sign * ci for ci in p.c] + [Fraction(0)] * (width - n)
    status = tab.run(primary, list(range(width)), tie_vars=range(n))
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, problem=p)
    x = [Fraction(0)] * n
    for i, bv in enumerate(tab.basis):
        if bv < n:
            x[bv] = tab.rhs[i]
    x = tuple(x)
    return LpSolution(OPTIMAL, x, p.value(x), problem=p)


MAX_ORACLE_VARS = 12
MAX_ORACLE_ROWS = 16


def _constraint_system(p: LpProblem):
    """All constraints as equalities-when-tight: A rows then x_j >= 0."""
    n = p.n_vars
    rows = [list(r) for r in p.a]
    rhs = list(p.b)
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        rows.append(e)
        rhs.append(Fraction(0))
    return rows, rhs


def enumerate_vertices(p: LpProblem, chunk: int = 20000) -> list[tuple]:
    """Every basic feasible solution of ``p`` by brute force.

    Each choice of ``n`` constraints (rows of A or bounds x_j >= 0) is made
    tight and solved by Cramer's rule. Determinants are screened in floating
    point; every surviving vertex is rebuilt as exact rationals and checked
    exactly for tightness and feasibility before it is reported.
    """
    n = p.n_vars
    if n > MAX_ORACLE_VARS or p.n_rows > MAX_ORACLE_ROWS:
        raise TooLarge(
            f"vertex enumeration is limited to {MAX_ORACLE_VARS} variables and "
            f"{MAX_ORACLE_ROWS} constraints, got {n} and {p.n_rows}"
        )
    if any(ai.denominator != 1 for r in p.a for ai in r) or any(v.denominator != 1 for v in p.b):
        raise ValueError("enumerate_vertices expects integer data")
    rows, rhs = _constraint_system(p)
    a = np.array([[float(v) for v in r] for r in rows])
    bvec = np.array([float(v) for v in rhs])
    total = len(rows)
    found = {}
    combos = itertools.combinations(range(total), n)
    remaining = comb(total, n)
    while remaining > 0:
        batch = list(itertools.islice(combos, chunk))
        remaining -= len(batch)
        idx = np.array(batch, dtype=np.intp)
        mats = a[idx]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 0.5
        if not ok.any():
            continue
        idx, mats, dets = idx[ok], mats[ok], dets[ok]
        sols = np.linalg.solve(mats, bvec[idx][..., None])[..., 0]
        feas = (sols >= -1e-9).all(axis=1) & (sols @ a[: p.n_rows].T <= bvec[: p.n_rows] + 1e-9).all(axis=1) \
            if all(s == LE for s in p.row_sense) else _float_feasible(p, a, bvec, sols)
        for sel, mat, det, sol in zip(idx[feas], mats[feas], dets[feas], sols[feas]):
            key = tuple(np.round(sol, 9))
            if key in found:
                continue
            x = _exact_vertex(mat, bvec[sel], round(det))
            if x is None:
                continue
            tight_ok = all(
                sum(ri * xi for ri, xi in zip(rows[r], x)) == rhs[r] for r in sel
            )
            if tight_ok and p.is_feasible(x):
                found[key] = x
    return sorted(set(found.values()))


def _float_feasible(p, a, bvec, sols):
    ok = (sols >= -1e-9).all(axis=1)
    lhs = sols @ a[: p.n_rows].T
    for i, s in enumerate(p.row_sense):
        if s == LE:
            ok &= lhs[:, i] <= bvec[i] + 1e-9
        elif s == GE:
            ok &= lhs[:, i] >= bvec[i] - 1e-9
        else:
            ok &= np.abs(lhs[:, i] - bvec[i]) <= 1e-9
    return ok


def _exact_vertex(mat, rhs, det):
    """Cramer's rule with integer determinants recovered from floats."""
    if det == 0:
        return None
    x = []
    for j in range(mat.shape[0]):
        mj = mat.copy()
        mj[:, j] = rhs
        x.append(Fraction(round(float(np.linalg.det(mj))), det))
    return tuple(x)


def check_duality(s1: LpSolution, s2: LpSolution) -> bool:
    """True iff two optimal solutions have exactly equal values."""
    if s1.status != OPTIMAL or s2.status != OPTIMAL:
        raise StatusMismatch(f"both problems must be optimal, got {s1.status} and {s2.status}")
    return s1.optimal_value == s2.optimal_value


def fmt(v) -> str:
    """Render a rational as ``"8/3"`` or ``"2"``."""
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def fmt_vec(v) -> list[str]:
    return [fmt(x) for x in v]


def parse_fraction(s) -> Fraction:
    return Fraction(s)
