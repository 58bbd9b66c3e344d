"""Exception types raised across the package."""


class PatternError(ValueError):
    pass


class UncoveredDatabase(PatternError):
    pass


class BadParams(ValueError):
    pass


class TooLarge(ValueError):
    pass


class GuardError(ValueError):
    pass


class StatusMismatch(ValueError):
    pass


class NonPositiveS(ValueError):
    pass


class DualityViolation(AssertionError):
    """Primal and dual optimal values disagree. Indicates a solver bug."""


class FieldTooSmall(ValueError):
    pass


class Inconsistent(ArithmeticError):
    pass


class RankDeficient(ArithmeticError):
    pass


class DimensionMismatch(ValueError):
    pass


class DegenerateS(ValueError):
    pass


class IntegralityViolation(ValueError):
    pass


class DecodeFailure(RuntimeError):
    pass


class NegativeEntry(ValueError):
    pass


class Undercounted(ValueError):
    pass


class InternalInvariantBroken(AssertionError):
    pass
