"""Exceptions raised by the gog-hhg library."""

from __future__ import annotations


class GogError(Exception):
    """Base class for every error raised by gog-hhg.

    Attributes:
        code: Machine-readable error name used in JSON output.
        line: 1-based source line, when the error comes from a parsed file.
        column: 1-based source column, when known.
    """

    code = "GogError"

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        """Initialize the error.

        Args:
            message: Human-readable description.
            line: 1-based source line, if known.
            column: 1-based source column, if known.
        """
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column


class ValidationError(GogError):
    """A graph of groups violates one of its invariants."""

    code = "ValidationError"


class DisconnectedGraph(ValidationError):
    """The underlying graph is empty or not connected."""

    code = "DisconnectedGraph"


class FiniteOrderAttachment(ValidationError):
    """An edge attachment does not have infinite order."""

    code = "FiniteOrderAttachment"


class UnknownGenerator(ValidationError):
    """A letter names a generator its vertex group does not have."""

    code = "UnknownGenerator"


class RankZero(ValidationError):
    """A free vertex group was declared with rank below one."""

    code = "RankZero"


class UnknownVertex(ValidationError):
    """A vertex id is not declared."""

    code = "UnknownVertex"


class UnknownEdge(ValidationError):
    """An edge id is not declared."""

    code = "UnknownEdge"


class MalformedWord(ValidationError):
    """A word is not a valid path or vertex word."""

    code = "MalformedWord"


class ParseError(GogError):
    """The text format could not be parsed."""

    code = "ParseError"


class TrivialWord(GogError):
    """An operation needing a nontrivial word received the identity."""

    code = "TrivialWord"


class SearchBudgetExceeded(GogError):
    """A bounded search expanded more nodes than its cap allows."""

    code = "SearchBudgetExceeded"


class NotTwoEnded(GogError):
    """A graph handed to the parametrizer has a vertex of free rank two or more."""

    code = "NotTwoEnded"


class NoWitness(GogError):
    """A witness was requested for a balanced graph."""

    code = "NoWitness"


class CertificateError(GogError):
    """A constructed certificate failed its own verification."""

    code = "CertificateError"
