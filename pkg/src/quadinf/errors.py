"""Exception hierarchy.

Configuration problems and numerical degeneracies are kept apart so the
command-line driver can map them to distinct exit statuses.
"""


class QuadinfError(Exception):
    """Base class for all package errors."""


class ConfigError(QuadinfError, ValueError):
    """Invalid user-supplied configuration (bad flag, missing column, ...)."""


class DimensionError(ConfigError):
    """Array shapes are inconsistent or too small."""


class DomainError(ConfigError):
    """Argument lies outside the mathematical domain of a function."""


class ParseError(ConfigError):
    """Input file could not be parsed."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DegeneracyError(QuadinfError, ArithmeticError):
    """A numerical quantity needed for inference is degenerate."""


class DegenerateDesignError(DegeneracyError):
    """Rank repair removed every column of the design."""


class SingularGramError(DegeneracyError):
    """The Gram matrix is not positive definite at the rank tolerance."""


class DegenerateVarianceError(DegeneracyError):
    """A standard error is zero, so a z-statistic is undefined."""


class DegenerateScaleError(DegeneracyError):
    """The total-variance estimate used as a denominator is not positive."""


class DegenerateDenominatorError(DegeneracyError):
    """A bias-corrected norm under a square root is not positive."""
