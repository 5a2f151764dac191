"""Exception hierarchy.

Every domain error renders as a single machine-parseable line,
``Name key=value ...``, which the CLI writes to stderr.
"""

from __future__ import annotations


class GlsgError(Exception):
    """Base class for all domain errors."""

    def __init__(self, **fields):
        self.fields = fields
        super().__init__(self.line())

    def line(self) -> str:
        parts = [type(self).__name__]
        parts += [f"{key}={value}" for key, value in self.fields.items()]
        return " ".join(parts)


class NotSquare(GlsgError):
    pass


class EntryOutOfRange(GlsgError):
    pass


class NotAssociative(GlsgError):
    pass


class GroupInvalid(GlsgError):
    pass


class InvalidFamily(GlsgError):
    pass


class UnsupportedFamily(GlsgError):
    pass


class NotNull(GlsgError):
    pass


class GraphTooLarge(GlsgError):
    pass


class UnknownFormat(GlsgError):
    pass


class NonSymmetric(GlsgError):
    pass


class NoConvergence(GlsgError):
    pass


class OrderTooLarge(GlsgError):
    pass


class CheckpointError(GlsgError):
    pass
