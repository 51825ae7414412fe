"""Exception hierarchy.

The CLI maps these onto exit codes: input problems exit 1, failed
preconditions exit 2, anything else exits 3.
"""


class HarmError(Exception):
    """Base class for every error raised by harmcalc."""


class InputError(HarmError):
    """Malformed input: unknown variable, out-of-range value, partial context."""


class ModelError(InputError):
    """The causal model itself is structurally invalid (e.g. cyclic)."""


class QueryError(InputError):
    """A cause or harm query is ill-posed (e.g. phi' does not entail not-phi)."""


class ExpressionError(InputError):
    """Syntax or type error in an equation expression."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class PreconditionError(HarmError):
    """A well-formed query whose precondition does not hold (e.g. AC1 fails)."""

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)
