"""Exception types shared across the package.

The CLI maps each class onto a distinct exit code.
"""


class ValidationError(ValueError):
    """Invalid user input (bad partition, malformed config, non-increasing grid...)."""


class CapacityError(RuntimeError):
    """Requested size exceeds a hard capacity cap (brute-force oracle)."""


class NumericalError(RuntimeError):
    """An internal numerical consistency check failed."""


class NoRevivalError(ValidationError):
    """No revival inside the requested time window."""
