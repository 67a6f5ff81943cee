"""Exception types shared across the package."""


class BsdopError(Exception):
    """Base class for all package-specific errors."""


class HypothesisError(BsdopError, ValueError):
    """A theorem hypothesis is violated; the message names the inequality."""


class DomainError(BsdopError, ValueError):
    """Evaluation requested outside the function's disk of analyticity."""


class EvaluationError(BsdopError, RuntimeError):
    """A sample point evaluated to a non-finite value."""


class TruncationError(BsdopError, RuntimeError):
    """A certified tail bound was not reachable within the term budget."""


class ConditioningError(BsdopError, RuntimeError):
    """An interpolation system is too ill-conditioned for the precision budget."""


class DegenerateFunctionError(BsdopError, ValueError):
    """The asymptotic comparison term vanishes (function has degree <= 1)."""
