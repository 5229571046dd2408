"""Exception hierarchy shared by the library and the CLI."""


class StarEmbedError(Exception):
    """Base class for all errors raised by this package."""


class InputError(StarEmbedError, ValueError):
    """Malformed or out-of-range input (bad node id, length mismatch, ...)."""


class UsageError(StarEmbedError, RuntimeError):
    """API misuse, e.g. feeding a policy requests out of order."""


class InvariantViolation(StarEmbedError, AssertionError):
    """An internal invariant failed; this indicates a bug, not bad input."""


class BudgetExceeded(StarEmbedError, RuntimeError):
    """A brute-force computation would exceed its configured work budget."""
