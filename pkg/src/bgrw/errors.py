"""Exception types shared across the package.

The CLI maps these onto exit codes: validation errors exit 1, resource and
runtime errors exit 2, invariant violations exit 3.
"""


class BgrwError(Exception):
    """Base class for all package errors."""


class ValidationError(BgrwError):
    """Bad user input: malformed config, out-of-range parameter, unknown field."""


class ResourceLimitError(BgrwError):
    """A run exceeded a configured budget (vertex cap, step budget)."""


class InvariantViolation(BgrwError):
    """An internal consistency check failed (tree audit, coupling order)."""
