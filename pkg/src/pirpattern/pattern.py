"""Collusion patterns and their incidence matrices.

Databases are numbered ``1..N`` in every public value and serialized
artifact. A pattern is a list of maximal colluding sets that together cover
every database.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadParams, PatternError, UncoveredDatabase

FORMAT_VERSION = 1


def _canonical_key(s):
    return (len(s), s)


@dataclass(frozen=True)
class CollusionPattern:
    """Maximal colluding sets over databases ``1..n_databases``.

    The order of ``sets`` is kept as given; it fixes the column order of the
    incidence matrix and the indexing of LP2 solutions. Use :func:`normalize`
    to obtain the canonical (size, then lexicographic) order.
    """

    n_databases: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.n_databases
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise PatternError(f"n_databases must be a positive integer, got {n!r}")
        sets = tuple(tuple(sorted(int(i) for i in s)) for s in self.sets)
        object.__setattr__(self, "n_databases", int(n))
        object.__setattr__(self, "sets", sets)
        if not sets:
            raise PatternError("a pattern needs at least one colluding set")
        for s in sets:
            if not s:
                raise PatternError("colluding sets must be non-empty")
            if len(set(s)) != len(s):
                raise PatternError(f"repeated database in set {list(s)}")
            if s[0] < 1 or s[-1] > n:
                raise PatternError(f"set {list(s)} is not within [1:{n}]")
        as_sets = [frozenset(s) for s in sets]
        for a, b in itertools.permutations(range(len(sets)), 2):
            if as_sets[a] <= as_sets[b]:
                raise PatternError(
                    f"set {list(sets[a])} is contained in {list(sets[b])}; "
                    "only maximal colluding sets are allowed"
                )
        covered = set().union(*as_sets)
        missing = sorted(set(range(1, n + 1)) - covered)
        if missing:
            raise UncoveredDatabase(f"databases {missing} appear in no colluding set")

    @property
    def n_sets(self) -> int:
        return len(self.sets)

    def __str__(self):
        body = ", ".join("{" + ",".join(map(str, s)) + "}" for s in self.sets)
        return f"N={self.n_databases}, P={{{body}}}"

    def to_json(self) -> dict:
        return {"n": self.n_databases, "sets": [list(s) for s in self.sets]}


def normalize(raw_sets, n: int) -> CollusionPattern:
    """Drop non-maximal and duplicate sets and sort canonically.

    Raises UncoveredDatabase when some database in ``[1:n]`` is left out.
    """
    if n < 1:
        raise PatternError(f"n must be >= 1, got {n}")
    uniq = set()
    for s in raw_sets:
        fs = frozenset(int(i) for i in s)
        if not fs:
            raise PatternError("colluding sets must be non-empty")
        if min(fs) < 1 or max(fs) > n:
            raise PatternError(f"set {sorted(fs)} is not within [1:{n}]")
        uniq.add(fs)
    maximal = [s for s in uniq if not any(s < t for t in uniq)]
    ordered = sorted((tuple(sorted(s)) for s in maximal), key=_canonical_key)
    covered = set().union(*maximal) if maximal else set()
    missing = sorted(set(range(1, n + 1)) - covered)
    if missing:
        raise UncoveredDatabase(f"databases {missing} appear in no colluding set")
    return CollusionPattern(n, tuple(ordered))


def incidence(p: CollusionPattern) -> np.ndarray:
    """N x M 0/1 matrix; entry (n, m) is 1 iff database n+1 is in set m."""
    b = np.zeros((p.n_databases, p.n_sets), dtype=np.int64)
    for m, s in enumerate(p.sets):
        for i in s:
            b[i - 1, m] = 1
    b.flags.writeable = False
    return b


def generate(kind: str, *args) -> CollusionPattern:
    """Build one of the classical patterns.

    ``non_colluding(N)``, ``t_colluding(N, T)``, ``cyclic(N, T)`` and
    ``disjoint([(N_1, T_1), ...])``. Sets come out in canonical order except
    for ``cyclic``, whose windows are listed by starting database.
    """
    if kind == "non_colluding":
        (n,) = args
        _check_nt(n, 1)
        return CollusionPattern(n, tuple((i,) for i in range(1, n + 1)))
    if kind == "t_colluding":
        n, t = args
        _check_nt(n, t)
        return CollusionPattern(n, tuple(itertools.combinations(range(1, n + 1), t)))
    if kind == "cyclic":
        n, t = args
        _check_nt(n, t)
        if t == n:
            return CollusionPattern(n, (tuple(range(1, n + 1)),))
        windows = tuple(tuple(sorted((s + j) % n + 1 for j in range(t))) for s in range(n))
        return CollusionPattern(n, windows)
    if kind == "disjoint":
        (blocks,) = args
        if not blocks:
            raise BadParams("disjoint needs at least one block")
        sets = []
        offset = 0
        for nj, tj in blocks:
            _check_nt(nj, tj)
            for c in itertools.combinations(range(offset + 1, offset + nj + 1), tj):
                sets.append(c)
            offset += nj
        return CollusionPattern(offset, tuple(sets))
    raise BadParams(f"unknown pattern kind {kind!r}")


def _check_nt(n, t):
    if not (isinstance(n, int) and isinstance(t, int)) or not 1 <= t <= n:
        raise BadParams(f"need integers 1 <= T <= N, got N={n!r}, T={t!r}")


def random_pattern(rng: np.random.Generator, n_max: int = 8, m_max: int = 10) -> CollusionPattern:
    """Random valid pattern with N <= n_max and M <= m_max.

    Draws random proper subsets (the full set only when N = 1), keeps the
    maximal ones and gives any database left out a singleton set. Draws with
    more than m_max maximal sets are repeated.
    """
    while True:
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(1, m_max + 1))
        raw = []
        for _ in range(m):
            size = int(rng.integers(1, max(n - 1, 1) + 1))
            raw.append(set(int(i) + 1 for i in rng.choice(n, size=size, replace=False)))
        for i in range(1, n + 1):
            if not any(i in s for s in raw):
                raw.append({i})
        p = normalize(raw, n)
        if p.n_sets <= m_max:
            return p


def pattern_from_json(obj: dict, *, canonical: bool = False) -> CollusionPattern:
    if "n" not in obj or "sets" not in obj:
        raise PatternError('pattern JSON needs "n" and "sets"')
    if canonical:
        return normalize(obj["sets"], int(obj["n"]))
    return CollusionPattern(int(obj["n"]), tuple(tuple(s) for s in obj["sets"]))


def load_pattern(path, *, canonical: bool = False) -> CollusionPattern:
    with open(Path(path)) as fh:
        return pattern_from_json(json.load(fh), canonical=canonical)


def dump_pattern(p: CollusionPattern, path) -> None:
    obj = {"format_version": FORMAT_VERSION, **p.to_json()}
    Path(path).write_text(json.dumps(obj) + "\n")
