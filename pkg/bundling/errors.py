"""Exception hierarchy for the bundling solver.

Each top-level family maps to one CLI exit code (see cli.EXIT_CODES).
"""
from typing import Optional


class BundlingError(Exception):
    """Base class for every error raised by the solver."""

    kind = "error"


# ============================================
# VALIDATION (exit 3)
# ============================================

class ValidationError(BundlingError):
    """Model, argument or configuration is invalid."""

    kind = "validation"


class DomainError(ValidationError):
    """A type or quantile lies outside its admissible range."""

    kind = "domain"


class MissingParameterError(ValidationError):
    """A bundle has no parameters in the model."""

    kind = "missing_parameter"


class ArgumentError(ValidationError):
    """Call arguments violate an operation's precondition."""

    kind = "argument"


# ============================================
# NUMERIC (exit 4)
# ============================================

class NumericError(BundlingError):
    """A numerical routine failed or produced inconsistent output."""

    kind = "numeric"

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class QuadratureError(NumericError):
    kind = "quadrature"


class BracketError(NumericError):
    kind = "bracket"


class ConsistencyError(NumericError):
    kind = "consistency"


class DegeneracyError(NumericError):
    kind = "degeneracy"


class AmbiguityError(BundlingError):
    """A quantity that must be unique is not (multiple roots, tied goods)."""

    kind = "ambiguity"


class LogicError(BundlingError):
    """An operation was called in a state its contract forbids."""

    kind = "logic"


# ============================================
# REFUSAL (exit 2)
# ============================================

class RefusalError(BundlingError):
    """The solver refuses to run because an assumption check failed."""

    kind = "refusal"

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
