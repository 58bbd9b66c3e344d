"""Exact capacity, achievable schemes and converse certificates for private
information retrieval from replicated databases under arbitrary collusion."""

from .capacity import CapacityResult, capacity_from_s, capacity_of_pattern, closed_form
from .converse import converse_bound, verify_certificate
from .pattern import CollusionPattern, generate, incidence, normalize
from .privacy import empirical_indistinguishability, verify_rank_privacy
from .ratlp import build_lp1, build_lp2, check_duality, solve
from .scheme import SchemePlan, synthesize
from .sim import decode, measured_rate, run

__all__ = [
    "CapacityResult",
    "CollusionPattern",
    "SchemePlan",
    "build_lp1",
    "build_lp2",
    "capacity_from_s",
    "capacity_of_pattern",
    "check_duality",
    "closed_form",
    "converse_bound",
    "decode",
    "empirical_indistinguishability",
    "generate",
    "incidence",
    "measured_rate",
    "normalize",
    "run",
    "solve",
    "synthesize",
    "verify_certificate",
    "verify_rank_privacy",
]
