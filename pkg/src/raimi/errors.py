"""Exception types shared across the library."""

from __future__ import annotations


class CoverError(ValueError):
    """A claimed cover fails the covering invariant.

    ``gap`` carries the uncovered region when it is known, so callers can
    report exactly what is missing instead of a bare boolean.
    """

    def __init__(self, message: str, gap=None):
        super().__init__(message)
        self.gap = gap


class InternalInvariantError(RuntimeError):
    """A quantity the construction guarantees failed to hold.

    Always an implementation bug, never a user error.  ``trace`` carries
    whatever partial construction record was available at the failure site.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class OracleError(RuntimeError):
    """The brute-force oracle cannot handle the instance size."""
