"""In-process execution of a plan: queries, answers, decoding and rate."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import gf
from .errors import DecodeFailure, DimensionMismatch, Inconsistent, RankDeficient
from .ratlp import fmt
from .scheme import SchemePlan

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Query:
    """Coefficient rows sent to one database.

    Each row acts on the concatenation (W_1, ..., W_K) and has K*L entries.
    ``labels[i]`` is the (message subset, position) the row stands for.
    """

    database: int
    rows: np.ndarray
    labels: tuple

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class Answer:
    database: int
    symbols: np.ndarray


@dataclass(frozen=True)
class Transcript:
    plan: SchemePlan
    messages: np.ndarray
    queries: tuple
    answers: tuple
    decoded: np.ndarray | None
    downloaded: int

    @property
    def success(self) -> bool:
        return self.decoded is not None and np.array_equal(
            self.decoded, self.messages[self.plan.theta - 1]
        )

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "plan": {
                "pattern": self.plan.pattern.to_json(),
                "k": self.plan.k_messages,
                "theta": self.plan.theta,
                "L": self.plan.block_length,
                "q": self.plan.field,
                "seed": self.plan.seed,
            },
            "messages": self.messages.tolist(),
            "queries": [
                {
                    "database": qu.database,
                    "labels": [{"subset": list(s), "position": p + 1} for s, p in qu.labels],
                    "rows": qu.rows.tolist(),
                }
                for qu in self.queries
            ],
            "answers": [{"database": a.database, "symbols": a.symbols.tolist()} for a in self.answers],
            "decoded": None if self.decoded is None else self.decoded.tolist(),
            "success": self.success,
            "downloaded": self.downloaded,
            "rate": fmt(measured_rate(self)),
        }


def build_queries(plan: SchemePlan) -> list[Query]:
    k, length, q = plan.k_messages, plan.block_length, plan.field
    out = []
    for n in range(plan.pattern.n_databases):
        blocks, labels = [], []
        for kset in plan.subsets:
            a, b = plan.allocation[kset][n]
            if b == a:
                continue
            block = np.zeros((b - a, k * length), dtype=np.int64)
            for m in kset:
                block[:, (m - 1) * length : m * length] = plan.coefficients(kset, m)[a:b]
            blocks.append(block)
            labels.extend((kset, p) for p in range(a, b))
        rows = np.vstack(blocks) if blocks else np.zeros((0, k * length), dtype=np.int64)
        rows %= q
        rows.flags.writeable = False
        out.append(Query(database=n + 1, rows=rows, labels=tuple(labels)))
    return out


def answer(messages, query: Query, q: int) -> Answer:
    """Each database returns its query rows applied to the stacked messages."""
    msgs = np.asarray(messages, dtype=np.int64)
    flat = msgs.reshape(-1)
    if msgs.ndim != 2 or flat.size != query.rows.shape[1]:
        raise DimensionMismatch(
            f"messages of shape {msgs.shape} do not match rows of width {query.rows.shape[1]}"
        )
    return Answer(database=query.database, symbols=gf.matmul(query.rows, flat, q))


def random_messages(plan: SchemePlan, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, plan.field, size=(plan.k_messages, plan.block_length), dtype=np.int64)


def _collect(plan: SchemePlan, queries, answers) -> dict:
    got = {kset: np.full(plan.budget(kset), -1, dtype=np.int64) for kset in plan.subsets}
    for qu, ans in zip(queries, answers):
        for (kset, pos), v in zip(qu.labels, ans.symbols):
            got[kset][pos] = v
    for kset, v in got.items():
        if np.any(v < 0):
            raise DecodeFailure(f"symbols of subset {list(kset)} are missing")
    return got


def decode(transcript: Transcript, plan: SchemePlan) -> np.ndarray:
    """Recover W_theta from the answers.

    Subsets are walked by size. A subset without theta yields, through the
    shared code, the interference it causes in the same subset joined with
    theta; that interference is then subtracted from the mixed sums, and the
    cleaned desired symbols are solved against U_theta.
    """
    return _decode(plan, transcript.queries, transcript.answers)


def _decode(plan: SchemePlan, queries, answers) -> np.ndarray:
    q, theta = plan.field, plan.theta
    got = _collect(plan, queries, answers)
    side = {}
    pieces = []
    try:
        for kset in plan.subsets:
            if plan.budget(kset) == 0:
                continue
            if theta not in kset:
                if len(kset) in plan.code_shapes:
                    code = plan.codes[len(kset)]
                    alpha = code.shape[1]
                    v = gf.solve_linear(code[:alpha], got[kset], q)
                    side[kset] = gf.matmul(code[alpha:], v, q)
                continue
            rest = tuple(i for i in kset if i != theta)
            sym = got[kset]
            if rest:
                sym = (sym - side[rest]) % q
            pieces.append(sym)
        return gf.solve_linear(plan.mixing[theta - 1], np.concatenate(pieces), q)
    except (Inconsistent, RankDeficient, KeyError) as exc:
        raise DecodeFailure(str(exc)) from exc


def run(plan: SchemePlan, messages=None, rng: np.random.Generator | None = None) -> Transcript:
    """Full retrieval: build queries, answer them, decode."""
    if messages is None:
        rng = np.random.default_rng(plan.seed) if rng is None else rng
        messages = random_messages(plan, rng)
    messages = gf.asfield(messages, plan.field)
    if messages.shape != (plan.k_messages, plan.block_length):
        raise DimensionMismatch(
            f"expected messages of shape {(plan.k_messages, plan.block_length)}, got {messages.shape}"
        )
    queries = build_queries(plan)
    answers = [answer(messages, qu, plan.field) for qu in queries]
    decoded = _decode(plan, queries, answers)
    return Transcript(
        plan=plan,
        messages=messages,
        queries=tuple(queries),
        answers=tuple(answers),
        decoded=decoded,
        downloaded=sum(a.symbols.size for a in answers),
    )


def measured_rate(transcript: Transcript) -> Fraction:
    return Fraction(transcript.plan.block_length, transcript.downloaded)


def dump_transcript(t: Transcript, path) -> None:
    Path(path).write_text(json.dumps(t.to_json()) + "\n")
