"""Exception hierarchy shared by all curatrace modules."""

from __future__ import annotations


class CuratraceError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CuratraceError):
    """Malformed N-Triples/N-Quads or update-query text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class UnsupportedConstruct(CuratraceError):
    """Update text uses SPARQL features outside the restricted grammar."""


class BlankNodePresent(CuratraceError):
    """Blank nodes cannot enter versioned entity states; skolemize upstream."""


class EntityMismatch(CuratraceError):
    """Two entity states that must describe the same entity do not."""


class InvalidChangeSet(CuratraceError):
    """Changeset halves overlap, span several graphs, or contain blanks."""


class HistoryCorrupt(CuratraceError):
    """Stored provenance contradicts itself (gaps, broken chains, bad inverses)."""


class TransportError(CuratraceError):
    """Remote endpoint unreachable, timed out, or returned a non-2xx status."""


class QueryError(CuratraceError):
    """The endpoint rejected a query; carries the offending query text."""

    def __init__(self, message: str, query: str | None = None):
        self.query = query
        super().__init__(message if query is None else f"{message}\nquery: {query}")


class UnsupportedQuery(QueryError):
    """The in-memory store only evaluates the query forms the engine emits."""


class AlreadyVersioned(CuratraceError):
    """Creation attempted for an entity that already has snapshots."""


class NoHistory(CuratraceError):
    """Modification or deletion attempted for an entity with no snapshots."""


class EmptyDiff(CuratraceError):
    """No-op edits are refused rather than recorded."""


class UnknownVersion(CuratraceError):
    """Requested snapshot number does not exist for the entity."""


class ShapeError(CuratraceError):
    """Problem in the shapes graph."""


class UnsupportedShape(ShapeError):
    """Shapes graph uses constructs outside the supported subset."""


class MalformedList(ShapeError):
    """An rdf:first/rdf:rest chain is broken or cyclic."""


class ConfigError(CuratraceError):
    """Bad YAML configuration; names the offending node."""

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(message if path is None else f"{path}: {message}")


class OrderingError(CuratraceError):
    """Sibling values do not form a single linear chain."""


class OrderCycle(OrderingError):
    pass


class OrderBranch(OrderingError):
    pass


class OrderDisconnected(OrderingError):
    pass


class Conflict(CuratraceError):
    """Optimistic-lock failure: the edited base version is no longer the head."""


class NotFound(CuratraceError):
    """Entity or version absent."""


class ValidationFailed(CuratraceError):
    """Submitted state violates the form schema; carries the full report."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(v.message for v in report.violations)
        super().__init__(f"state violates schema: {lines}")
