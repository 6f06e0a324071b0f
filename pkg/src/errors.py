"""
Exception types raised by the toolkit.
"""
from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .validation import ValidationReport


class FlowError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(FlowError):
    """Invalid toolkit settings."""


class DocumentError(FlowError):
    """An annotation document could not be parsed."""


class GraphValidationError(FlowError):
    """
    A document violates error-severity schema rules.

    Attributes:
        report: The full validation report (errors and warnings)
    """

    def __init__(self, report: "ValidationReport", source: Optional[str] = None):
        self.report = report
        self.source = source
        count = len(report.errors)
        where = f"{source}: " if source else ""
        super().__init__(f"{where}{count} schema error(s)")


class UnknownNodeError(FlowError):
    """A node id was not found in the graph."""

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"Unknown node id: {node_id}")


class CompressionError(FlowError):
    """The graph cannot be compressed (no conclusion node)."""


class ExportError(FlowError):
    """The graph cannot be rendered in the requested format."""


class QueryError(FlowError):
    """A query program is invalid (unsafe, negated derived predicate, arity or type mismatch)."""


class QueryParseError(QueryError):
    """
    Syntax error in query or fact text.

    Attributes:
        line: 1-based line of the error
        column: 1-based column of the error
    """

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class StatsError(FlowError):
    """Corpus statistics cannot be computed."""
