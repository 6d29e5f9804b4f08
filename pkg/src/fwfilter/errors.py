"""Exception hierarchy shared across the toolkit.

Two families matter to the command-line layer: configuration/validation
problems (exit code 2) and runtime/data problems (exit code 3).  Every
exception carries its family in ``exit_code`` so the CLI can map errors
without inspecting types one by one.
"""


class FilterError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 3


class ConfigError(FilterError):
    """Invalid configuration or arguments detected before any work runs."""

    exit_code = 2


class ParameterError(ConfigError):
    """An operation argument is out of its documented range."""


class DimensionError(ConfigError):
    """Shapes or lengths do not line up (window order, series length)."""


class AlignmentError(ConfigError):
    """Paired series have mismatched lengths."""


class DomainError(ConfigError):
    """A scalar argument is outside the mathematical domain of the op."""


class DataError(FilterError):
    """Runtime data problem: missing file, unusable series."""


class DegenerateSeriesError(DataError):
    """Series has zero variance, so standardization is undefined."""


class IntegrationDivergenceError(DataError):
    """Numerical integration produced a non-finite state."""

    def __init__(self, step_index, message=None):
        self.step_index = step_index
        super().__init__(
            message or f"integration diverged at step {step_index}"
        )


class ConditioningError(FilterError):
    """A matrix factorization failed because the system is not positive
    definite; carries the offending pivot so callers can report it."""

    def __init__(self, message, pivot=None):
        self.pivot = pivot
        super().__init__(message)
