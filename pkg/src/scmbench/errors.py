"""Shared exception types.

Three failure classes cover the whole toolkit: bad arguments, operations
that are undefined for an otherwise valid input, and data that is too
degenerate to compute on (constant columns, rank deficiency). Everything
fails fast; no NaN propagation.
"""


class ParameterError(ValueError):
    """An argument is out of range, mis-shaped, or violates a precondition."""


class DomainError(ValueError):
    """The operation is undefined for this input (e.g. adjacent node pair)."""


class DegenerateDataError(ValueError):
    """Input data cannot support the computation (constant column, singular design)."""
