"""
Exception Types
===============
Every error raised on purpose by the library derives from UspError, so the
CLI can separate configuration problems (exit 1) from numeric failures (exit 2).
"""

from typing import Optional


class UspError(Exception):
    """Base class for all library errors"""


class DimensionMismatchError(UspError, ValueError):
    """Arrays with incompatible shapes were combined"""


class NotPositiveDefiniteError(UspError, ValueError):
    """A matrix that must be symmetric positive definite failed its Cholesky factorization"""

    def __init__(self, label: str = "matrix", detail: str = ""):
        self.label = label
        message = f"{label} is not positive definite"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.detail = detail

    def __reduce__(self):
        return (type(self), (self.label, self.detail))


class RankDeficientDesignError(UspError):
    """The covariate design does not identify beta"""


class ImproperPosteriorError(UspError):
    """The joint posterior is improper for the given (k, p, m)"""


class UnsupportedDimensionError(UspError):
    """Operation is only implemented for small p"""


class DegenerateChainError(UspError, ValueError):
    """A chain is too short or constant for the requested diagnostic"""


class ChainNumericError(UspError):
    """Numeric failure inside the sampler, with the iteration where it happened"""

    def __init__(self, iteration: int, cause: Exception):
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"numeric failure at iteration {iteration}: {cause}")

    def __reduce__(self):
        return (type(self), (self.iteration, self.cause))


class CellEvaluationError(UspError):
    """A simulation inside a coverage cell failed"""

    def __init__(self, simulation: int, cause: Exception):
        self.simulation = simulation
        self.cause = cause
        super().__init__(f"simulation {simulation} failed: {cause}")

    def __reduce__(self):
        return (type(self), (self.simulation, self.cause))


class DatasetError(UspError, ValueError):
    """A dataset file could not be parsed or violates the dataset invariants"""

    def __init__(self, message: str, line: Optional[int] = None, group: Optional[int] = None):
        self.line = line
        self.group = group
        where = []
        if line is not None:
            where.append(f"line {line}")
        if group is not None:
            where.append(f"group {group}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.message = message

    def __reduce__(self):
        return (type(self), (self.message, self.line, self.group))


class ConfigError(UspError, ValueError):
    """Run configuration or preset is invalid"""
