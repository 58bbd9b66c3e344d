"""Construction of the capacity-achieving retrieval scheme for a collusion pattern.

Messages are indexed ``1..K``. Every non-empty subset of messages gets a
budget of downloaded ``|subset|``-sums that depends only on the subset size:

    budget(j) = (1/S)^(K-1) * (S-1)^(j-1) * L

and the symbols of each subset are split among the databases in proportion
to ``y_n / S``. For the desired message the encoded symbols are rows of
``U_theta W_theta``. For an undesired message ``k``, the subsets containing
``k`` but not theta form classes; class ``i`` owns a segment of
``U_k[:L/S]`` and is encoded with an MDS code whose top rows feed the
subset itself and whose bottom rows feed the subset joined with theta.

The code for subsets of size ``j`` is shared by every undesired message,
which is what lets the user strip interference from the mixed sums.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import gf
from .errors import BadParams, DegenerateS, FieldTooSmall, IntegralityViolation
from .pattern import CollusionPattern, incidence, pattern_from_json
from .ratlp import build_lp1, fmt, parse_fraction, solve

FORMAT_VERSION = 1
_SEARCH_TRIES = 2000


def message_subsets(k: int) -> list[tuple[int, ...]]:
    """Non-empty subsets of ``1..k`` by size, then lexicographically."""
    out = []
    for j in range(1, k + 1):
        out.extend(itertools.combinations(range(1, k + 1), j))
    return out


def _check_y(y):
    y = tuple(Fraction(v) for v in y)
    if any(v < 0 for v in y):
        raise BadParams("y must be non-negative")
    s = sum(y, Fraction(0))
    if s < 1:
        raise DegenerateS(f"sum(y) = {s} < 1 gives negative or undefined budgets")
    return y, s


def _unit_terms(y, s, k):
    for j in range(1, k + 1):
        for v in y:
            yield (1 / s) ** k * (s - 1) ** (j - 1) * v


def choose_block_length(y, s, k: int) -> int:
    """Least L making every per-database share of every budget an integer."""
    y = tuple(Fraction(v) for v in y)
    s = Fraction(s)
    if s != sum(y, Fraction(0)):
        raise BadParams(f"s={s} differs from sum(y)={sum(y)}")
    _check_y(y)
    return math.lcm(*(t.denominator for t in _unit_terms(y, s, k)))


def budgets(s, k: int, length: int) -> dict[int, int]:
    """Budget per subset size ``j``."""
    s = Fraction(s)
    out = {}
    for j in range(1, k + 1):
        b = (1 / s) ** (k - 1) * (s - 1) ** (j - 1) * length
        if b.denominator != 1:
            raise IntegralityViolation(f"budget for size {j} is {b} at L={length}")
        out[j] = int(b)
    return out


def code_shapes(bud: dict[int, int], k: int) -> dict[int, tuple[int, int]]:
    """(length, dimension) of the shared code for each undesired class size."""
    shapes = {}
    for j in range(1, k):
        if bud[j] > 0:
            shapes[j] = (bud[j] + bud[j + 1], bud[j])
    return shapes


def choose_field(shapes: dict[int, tuple[int, int]]) -> int:
    """Smallest prime at least as large as the longest code."""
    if not shapes:
        return 2
    return gf.next_prime(max(n for n, _ in shapes.values()))


def allocate_queries(y, s, k: int, length: int) -> dict[tuple[int, ...], tuple[tuple[int, int], ...]]:
    """Per subset, one half-open range ``[start, stop)`` per database.

    Ranges are consecutive in database order and have sizes
    ``budget * y_n / S``.
    """
    y = tuple(Fraction(v) for v in y)
    s = Fraction(s)
    bud = budgets(s, k, length)
    by_size = {}
    for j, b in bud.items():
        start = 0
        ranges = []
        for n, v in enumerate(y, start=1):
            share = b * v / s
            if share.denominator != 1:
                raise IntegralityViolation(f"database {n} share of size-{j} budget is {share}")
            ranges.append((start, start + int(share)))
            start += int(share)
        if start != b:
            raise IntegralityViolation(f"shares of size-{j} budget add up to {start}, not {b}")
        by_size[j] = tuple(ranges)
    return {kset: by_size[len(kset)] for kset in message_subsets(k)}


def _selected_code_rows(alloc_j, alloc_j1, alpha, dbs):
    rows = []
    for n in dbs:
        a, b = alloc_j[n - 1]
        rows.extend(range(a, b))
    for n in dbs:
        a, b = alloc_j1[n - 1]
        rows.extend(range(alpha + a, alpha + b))
    return rows


def _search_systematic(length, dim, q, pattern, alloc_j, alloc_j1, tag):
    rng = np.random.default_rng([0x5EED, tag, length, dim, q])
    eye = np.eye(dim, dtype=np.int64)
    picks = [_selected_code_rows(alloc_j, alloc_j1, dim, t) for t in pattern.sets]
    for _ in range(_SEARCH_TRIES):
        g = np.vstack([eye, rng.integers(0, q, size=(length - dim, dim), dtype=np.int64)])
        if all(len(r) <= dim and gf.rank(g[r], q) == len(r) for r in picks):
            return g
    raise FieldTooSmall(f"no usable ({length},{dim}) generator found over F_{q}")


@dataclass(frozen=True)
class SchemePlan:
    pattern: CollusionPattern
    k_messages: int
    theta: int
    y: tuple
    s: Fraction
    block_length: int
    field: int
    seed: int
    budgets: dict
    allocation: dict
    checked: bool = True
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    # ----- structure -----
    @property
    def subsets(self):
        return message_subsets(self.k_messages)

    @property
    def code_shapes(self):
        return code_shapes(self.budgets, self.k_messages)

    def budget(self, kset) -> int:
        return self.budgets[len(kset)]

    @property
    def segment(self) -> int:
        """L/S: rows of each undesired mixing matrix that are ever used."""
        return int(Fraction(self.block_length) / self.s)

    def desired_offsets(self) -> dict:
        off, out = 0, {}
        for kset in self.subsets:
            if self.theta in kset:
                out[kset] = off
                off += self.budget(kset)
        return out

    def classes(self, k: int) -> list[tuple[tuple[int, ...], int]]:
        """(subset, segment offset) for each class of undesired message ``k``."""
        if k == self.theta:
            raise BadParams("the desired message has no undesired classes")
        off, out = 0, []
        for kset in self.subsets:
            if k in kset and self.theta not in kset:
                out.append((kset, off))
                off += self.budget(kset)
        return out

    def rows_per_database(self) -> tuple[int, ...]:
        n_db = self.pattern.n_databases
        counts = [0] * n_db
        for kset in self.subsets:
            for n, (a, b) in enumerate(self.allocation[kset]):
                counts[n] += b - a
        return tuple(counts)

    @property
    def downloaded(self) -> int:
        return sum(self.rows_per_database())

    @property
    def rate(self) -> Fraction:
        return Fraction(self.block_length, self.downloaded)

    # ----- matrices, regenerated from the seed on first use -----
    @property
    def codes(self) -> dict:
        if "codes" not in self._cache:
            out = {}
            q = self.field
            for j, (length, dim) in self.code_shapes.items():
                if q >= length:
                    g = gf.vandermonde_mds(length, dim, q)
                else:
                    g = _search_systematic(
                        length, dim, q, self.pattern,
                        self.allocation[tuple(range(1, j + 1))],
                        self.allocation[tuple(range(1, j + 2))], j,
                    )
                g.flags.writeable = False
                out[j] = g
            self._cache["codes"] = out
        return self._cache["codes"]

    def code_kind(self, j: int) -> str:
        length, _ = self.code_shapes[j]
        return "vandermonde" if self.field >= length else "systematic"

    @property
    def mixing(self) -> tuple:
        if "mixing" not in self._cache:
            rng = np.random.default_rng(self.seed)
            mats = []
            for _ in range(self.k_messages):
                u = gf.random_full_rank(self.block_length, self.field, rng)
                u.flags.writeable = False
                mats.append(u)
            self._cache["mixing"] = tuple(mats)
        return self._cache["mixing"]

    def mds_blocks(self, k: int) -> list:
        """(class subset, code matrix) pairs forming the block-diagonal stack of message ``k``."""
        return [(kset, self.codes[len(kset)]) for kset, _ in self.classes(k)]

    def selector(self, kset, k: int) -> np.ndarray:
        """Structural matrix S with x_kset^[k] = S @ U_k @ W_k."""
        size = self.budget(kset)
        sel = np.zeros((size, self.block_length), dtype=np.int64)
        if size == 0:
            return sel
        if k == self.theta:
            off = self.desired_offsets()[kset]
            sel[:, off : off + size] = np.eye(size, dtype=np.int64)
            return sel
        top = self.theta not in kset
        base = kset if top else tuple(i for i in kset if i != self.theta)
        offset = dict(self.classes(k))[base]
        code = self.codes[len(base)]
        alpha = code.shape[1]
        part = code[:alpha] if top else code[alpha:]
        sel[:, offset : offset + alpha] = part
        return sel

    def coefficients(self, kset, k: int) -> np.ndarray:
        """Rows of x_kset^[k] as linear maps of W_k."""
        key = ("coef", kset, k)
        if key not in self._cache:
            c = gf.matmul(self.selector(kset, k), self.mixing[k - 1], self.field)
            c.flags.writeable = False
            self._cache[key] = c
        return self._cache[key]

    # ----- serialization -----
    def to_json(self, full: bool = False) -> dict:
        obj = {
            "format_version": FORMAT_VERSION,
            "pattern": self.pattern.to_json(),
            "k": self.k_messages,
            "theta": self.theta,
            "y": [fmt(v) for v in self.y],
            "s": fmt(self.s),
            "L": self.block_length,
            "q": self.field,
            "seed": self.seed,
            "checked": self.checked,
            "budgets": {str(j): b for j, b in self.budgets.items()},
            "codes": [
                {"size": j, "length": n, "dim": d, "kind": self.code_kind(j)}
                for j, (n, d) in self.code_shapes.items()
            ],
            "allocation": [
                {
                    "subset": list(kset),
                    "ranges": [[a + 1, b] if b > a else None for a, b in self.allocation[kset]],
                }
                for kset in self.subsets
            ],
            "rows_per_database": list(self.rows_per_database()),
            "downloaded": self.downloaded,
            "rate": fmt(self.rate),
        }
        if full:
            obj["mixing"] = [u.tolist() for u in self.mixing]
            for entry in obj["codes"]:
                entry["matrix"] = self.codes[entry["size"]].tolist()
        return obj


def synthesize(
    pattern: CollusionPattern,
    k: int,
    theta: int,
    seed: int = 0,
    y=None,
    field: int | None = None,
    check_feasible: bool = True,
) -> SchemePlan:
    """Build a plan retrieving message ``theta`` out of ``k``.

    ``y`` defaults to the LP1 optimum; any non-negative rational y with
    B^T y <= 1 and sum(y) >= 1 works. ``field`` overrides the prime q; when it
    is smaller than the longest code a systematic generator is searched for
    instead of a Vandermonde one. ``check_feasible=False`` skips the
    B^T y <= 1 test, which is only useful for building broken plans on purpose.
    """
    if not isinstance(k, int) or k < 1:
        raise BadParams(f"K must be a positive integer, got {k!r}")
    if not isinstance(theta, int) or not 1 <= theta <= k:
        raise BadParams(f"theta must be in [1, {k}], got {theta!r}")
    if not isinstance(seed, int) or seed < 0:
        raise BadParams(f"seed must be a non-negative integer, got {seed!r}")
    b = incidence(pattern)
    if y is None:
        y = solve(build_lp1(b)).optimal_vector
    y, s = _check_y(y)
    if len(y) != pattern.n_databases:
        raise BadParams(f"y has {len(y)} entries for {pattern.n_databases} databases")
    if check_feasible:
        for m, t in enumerate(pattern.sets):
            load = sum((y[i - 1] for i in t), Fraction(0))
            if load > 1:
                raise BadParams(f"y violates the constraint of set {list(t)}: load {load} > 1")
    length = choose_block_length(y, s, k)
    bud = budgets(s, k, length)
    q = choose_field(code_shapes(bud, k)) if field is None else gf.check_prime(field)
    return SchemePlan(
        pattern=pattern,
        k_messages=k,
        theta=theta,
        y=y,
        s=s,
        block_length=length,
        field=q,
        seed=seed,
        budgets=bud,
        allocation=allocate_queries(y, s, k, length),
        checked=check_feasible,
    )


def plan_from_json(obj: dict) -> SchemePlan:
    """Rebuild a plan; matrices are regenerated from the stored seed."""
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise BadParams(f"unsupported plan format_version {version!r}")
    plan = synthesize(
        pattern_from_json(obj["pattern"]),
        int(obj["k"]),
        int(obj["theta"]),
        seed=int(obj["seed"]),
        y=[parse_fraction(v) for v in obj["y"]],
        field=int(obj["q"]),
        check_feasible=bool(obj.get("checked", True)),
    )
    if plan.block_length != obj["L"]:
        raise BadParams(f"stored L={obj['L']} disagrees with rebuilt L={plan.block_length}")
    return plan


def load_plan(path) -> SchemePlan:
    return plan_from_json(json.loads(Path(path).read_text()))


def dump_plan(plan: SchemePlan, path, full: bool = False) -> None:
    Path(path).write_text(json.dumps(plan.to_json(full=full)) + "\n")
