"""Worked-example collusion patterns, kept in their published set order.

Set order matters: LP2 solutions and converse integer weights are indexed by
it. The dictionaries below also hold the published reference numbers that
the test-suite and the ``demo`` command compare against.
"""

from fractions import Fraction as F

from .pattern import CollusionPattern

P1 = CollusionPattern(5, ((1, 2, 3), (1, 4), (2, 4), (3, 4), (5,)))
P2 = CollusionPattern(
    5, ((1, 3, 4), (2, 3, 4), (1, 3, 5), (2, 3, 5), (1, 4, 5), (2, 4, 5), (3, 4, 5))
)
P3 = CollusionPattern(7, ((1, 4), (2, 5), (1, 2, 3, 6), (3, 7), (4, 5, 6, 7)))
P4 = CollusionPattern(
    5, ((1, 2, 3), (1, 3, 4), (2, 3, 4), (1, 2, 5), (1, 3, 5), (2, 3, 5), (4, 5))
)
P5 = CollusionPattern(5, ((1, 3), (2, 3), (3, 4), (1, 5), (2, 5), (4, 5)))
P6 = CollusionPattern(5, ((1, 2), (2, 3, 4), (2, 5), (1, 3, 5), (1, 4, 5), (3, 4, 5)))

PATTERNS = {"P1": P1, "P2": P2, "P3": P3, "P4": P4, "P5": P5, "P6": P6}

# Published optimal values and vectors. ``None`` marks a quantity the source
# does not pin down (non-unique optimum) or does not report.
REFERENCE = {
    "P1": {
        "k": 2,
        "s_star": F(8, 3),
        "y_star": (F(1, 3), F(1, 3), F(1, 3), F(2, 3), F(1)),
        "x_star": (F(2, 3), F(1, 3), F(1, 3), F(1, 3), F(1)),
        "L": 64,
        "rate": F(8, 11),
        "g": 3,
        "gm": (2, 1, 1, 1, 3),
        "rows_per_db": (11, 11, 11, 22, 33),
        "view_rank": 24,
    },
    "P2": {
        "k": 2,
        "s_star": F(2),
        "y_star": (F(1), F(1), F(0), F(0), F(0)),
        "x_star": (F(1, 3),) * 6 + (F(0),),
        "L": 4,
        "rate": F(2, 3),
        "g": 3,
        "gm": (1, 1, 1, 1, 1, 1, 0),
    },
    "P3": {
        "k": 2,
        "s_star": F(2),
        "y_star": None,
        "x_star": (F(0), F(0), F(1), F(0), F(1)),
        "rate": F(2, 3),
        "g": 1,
        "gm": (0, 0, 1, 0, 1),
    },
    "P4": {
        "k": 3,
        "s_star": F(7, 4),
        "y_star": (F(1, 4), F(1, 4), F(1, 4), F(1, 2), F(1, 2)),
        "L": 343,
        "rate": F(49, 93),
        "downloaded": 651,
        "codes": ((196, 112), (147, 84)),
    },
    "P5": {
        "s2": F(3),
        "x_feasible": (F(1, 2),) * 6,
        "g": 2,
    },
    "P6": {
        "s2": F(9, 5),
        "x_star": (F(1, 5), F(3, 5), F(1, 5), F(2, 5), F(2, 5), F(0)),
        "g": 5,
        "gm": (1, 3, 1, 2, 2, 0),
        "algorithm1_iterations": 8,
    },
}
