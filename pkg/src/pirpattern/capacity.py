"""Capacity from the effective number of databases S, and closed forms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadParams, DualityViolation, NonPositiveS
from .pattern import CollusionPattern, incidence
from .ratlp import build_lp1, build_lp2, fmt, solve


@dataclass(frozen=True)
class CapacityResult:
    s_star: Fraction
    k_messages: int
    capacity: Fraction
    y_star: tuple
    x_star: tuple

    @property
    def decimal(self) -> str:
        return decimal6(self.capacity)

    def to_json(self) -> dict:
        return {
            "s_star": fmt(self.s_star),
            "k": self.k_messages,
            "capacity": fmt(self.capacity),
            "capacity_decimal": self.decimal,
            "y_star": [fmt(v) for v in self.y_star],
            "x_star": [fmt(v) for v in self.x_star],
        }


def decimal6(v: Fraction) -> str:
    # round half up on the exact value, no float detour
    scaled = (Fraction(v) * 10**6 + Fraction(1, 2)).__floor__()
    return f"{scaled // 10**6}.{scaled % 10**6:06d}"


def capacity_from_s(s, k: int) -> Fraction:
    """(1 + 1/s + ... + (1/s)^(k-1))^-1 as an exact rational.

    Any s > 0 is accepted; valid patterns always give s >= 1.
    """
    s = Fraction(s)
    if s <= 0:
        raise NonPositiveS(f"S must be positive, got {s}")
    if not isinstance(k, int) or k < 1:
        raise BadParams(f"K must be a positive integer, got {k!r}")
    inv = 1 / s
    return 1 / sum(inv**i for i in range(k))


def capacity_of_pattern(p: CollusionPattern, k: int) -> CapacityResult:
    b = incidence(p)
    s1 = solve(build_lp1(b))
    s2 = solve(build_lp2(b))
    if s1.optimal_value != s2.optimal_value:
        raise DualityViolation(f"LP1 gives {s1.optimal_value}, LP2 gives {s2.optimal_value}")
    return CapacityResult(
        s_star=s1.optimal_value,
        k_messages=k,
        capacity=capacity_from_s(s1.optimal_value, k),
        y_star=s1.optimal_vector,
        x_star=s2.optimal_vector,
    )


def closed_form_s(kind: str, params) -> Fraction:
    """S* for the classical patterns without solving an LP.

    non_colluding: N. t_colluding and cyclic: N/T. disjoint: sum of N_j/T_j.
    """
    if kind == "non_colluding":
        (n,) = _as_tuple(params)
        _check(n, 1)
        return Fraction(n)
    if kind in ("t_colluding", "cyclic"):
        n, t = _as_tuple(params)
        _check(n, t)
        return Fraction(n, t)
    if kind == "disjoint":
        blocks = params
        if not blocks:
            raise BadParams("disjoint needs at least one block")
        total = Fraction(0)
        for n, t in blocks:
            _check(n, t)
            total += Fraction(n, t)
        return total
    raise BadParams(f"unknown pattern kind {kind!r}")


def closed_form(kind: str, params, k: int) -> Fraction:
    return capacity_from_s(closed_form_s(kind, params), k)


def _as_tuple(params):
    return tuple(params) if isinstance(params, (tuple, list)) else (params,)


def _check(n, t):
    if not (isinstance(n, int) and isinstance(t, int)) or not 1 <= t <= n:
        raise BadParams(f"need integers 1 <= T <= N, got N={n!r}, T={t!r}")
