"""Changesets between entity states and their SPARQL Update wire form.

A changeset is a pair of disjoint quad sets (deletions, additions) confined
to one graph. It serializes to a restricted `DELETE DATA`/`INSERT DATA`
update string, parses back, and inverts by swapping its halves; folding
inverted updates newest-to-oldest reconstructs any past entity state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BlankNodePresent,
    EntityMismatch,
    HistoryCorrupt,
    InvalidChangeSet,
    ParseError,
    UnsupportedConstruct,
)
from . import rdf
from .rdf import DEFAULT_GRAPH, EntityState, GraphName, Quad, Triple

log = logging.getLogger("curatrace.delta")

# Valid SPARQL update verbs/clauses we deliberately refuse.
_REFUSED_KEYWORDS = {
    "WHERE", "PREFIX", "BASE", "LOAD", "CLEAR", "DROP", "CREATE", "ADD",
    "MOVE", "COPY", "WITH", "USING", "SELECT", "CONSTRUCT", "ASK", "DESCRIBE",
}


@dataclass(frozen=True)
class ChangeSet:
    """Disjoint deletion/addition quad sets sharing one graph component."""

    deletions: frozenset[Quad]
    additions: frozenset[Quad]

    def __init__(self, deletions: Iterable[Quad] = (), additions: Iterable[Quad] = ()):
        dels = frozenset(deletions)
        adds = frozenset(additions)
        overlap = dels & adds
        if overlap:
            sample = rdf.term_text(next(iter(overlap)).subject)
            raise InvalidChangeSet(
                f"{len(overlap)} quad(s) appear in both halves (e.g. subject {sample})"
            )
        graphs = {q.graph for q in dels} | {q.graph for q in adds}
        if len(graphs) > 1:
            raise InvalidChangeSet("changeset quads span more than one graph")
        for q in dels | adds:
            if rdf.contains_blank(q):
                raise BlankNodePresent("blank nodes cannot appear in a changeset")
        object.__setattr__(self, "deletions", dels)
        object.__setattr__(self, "additions", adds)

    @property
    def graph(self) -> GraphName:
        for q in self.deletions:
            return q.graph
        for q in self.additions:
            return q.graph
        return DEFAULT_GRAPH

    def is_empty(self) -> bool:
        return not self.deletions and not self.additions

    def deletion_triples(self) -> frozenset[Triple]:
        return frozenset(q.triple() for q in self.deletions)

    def addition_triples(self) -> frozenset[Triple]:
        return frozenset(q.triple() for q in self.additions)


def diff(old: EntityState, new: EntityState, data_graph: GraphName = DEFAULT_GRAPH) -> ChangeSet:
    """Changeset turning `old` into `new`, lifted into `data_graph`."""
    if old.entity != new.entity:
        raise EntityMismatch(
            f"cannot diff states of {old.entity.value} and {new.entity.value}"
        )
    removed = old.triples - new.triples
    added = new.triples - old.triples
    lift = lambda ts: (Quad(t.subject, t.predicate, t.object, data_graph) for t in ts)
    return ChangeSet(deletions=lift(removed), additions=lift(added))


def invert(cs: ChangeSet) -> ChangeSet:
    """Swap the halves; applying cs then invert(cs) is the identity."""
    return ChangeSet(deletions=cs.additions, additions=cs.deletions)


def _triple_block(quads: frozenset[Quad]) -> str:
    triples = sorted((q.triple() for q in quads),
                     key=lambda t: (rdf.term_text(t.subject), rdf.term_text(t.predicate),
                                    rdf.term_text(t.object)))
    return " ".join(
        f"{rdf.term_text(t.subject)} {rdf.term_text(t.predicate)} {rdf.term_text(t.object)} ."
        for t in triples
    )


def _data_unit(verb: str, quads: frozenset[Quad], graph: GraphName) -> str:
    inner = _triple_block(quads)
    if graph is DEFAULT_GRAPH:
        return f"{verb} DATA {{ {inner} }}"
    return f"{verb} DATA {{ GRAPH {rdf.term_text(graph)} {{ {inner} }} }}"


def to_update_query(cs: ChangeSet) -> str:
    """Canonical update text; DELETE always precedes INSERT, empty halves omitted."""
    units = []
    if cs.deletions:
        units.append(_data_unit("DELETE", cs.deletions, cs.graph))
    if cs.additions:
        units.append(_data_unit("INSERT", cs.additions, cs.graph))
    return "; ".join(units)


def insert_data_text(quads: Iterable[Quad]) -> str:
    """Canonical INSERT DATA units for arbitrary quads, one unit per graph."""
    by_graph: dict[GraphName, set[Quad]] = {}
    for q in quads:
        by_graph.setdefault(q.graph, set()).add(q)
    units = [
        _data_unit("INSERT", frozenset(group), graph)
        for graph, group in sorted(by_graph.items(), key=lambda kv: rdf.graph_text(kv[0]))
    ]
    return "; ".join(units)


class _UpdateScanner(rdf._Scanner):
    """Free-form scanner over full update text; errors carry derived line/col."""

    def __init__(self, text: str):
        super().__init__(text, 1)

    def error(self, message, col=None):
        pos = self.pos if col is None else col
        line = self.text.count("\n", 0, pos) + 1
        last_nl = self.text.rfind("\n", 0, pos)
        return ParseError(message, line, pos - last_nl)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def scan_keyword(self) -> str:
        start = self.pos
        while not self.at_end() and (self.peek().isascii() and self.peek().isalpha()):
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a keyword")
        return self.text[start:self.pos]


def _scan_data_term(sc: _UpdateScanner, position: str):
    c = sc.peek()
    if c in ("?", "$"):
        raise UnsupportedConstruct("variables are not allowed in DATA blocks")
    if c == "_" or sc.text[sc.pos:sc.pos + 2] == "[]":
        raise UnsupportedConstruct("blank nodes are not allowed in DATA blocks")
    if position == "object":
        return sc.scan_object()
    return sc.scan_iriref(position)


def _parse_triple_lines(sc: _UpdateScanner, graph: GraphName) -> set[Quad]:
    quads: set[Quad] = set()
    while True:
        sc.skip_ws()
        if sc.peek() == "}":
            return quads
        if sc.at_end():
            raise sc.error("unterminated DATA block")
        subject = _scan_data_term(sc, "subject")
        sc.skip_ws()
        predicate = _scan_data_term(sc, "predicate")
        sc.skip_ws()
        obj = _scan_data_term(sc, "object")
        quads.add(Quad(subject, predicate, obj, graph))
        sc.skip_ws()
        if sc.peek() == ".":
            sc.pos += 1
        elif sc.peek() != "}":
            raise sc.error("expected '.' or '}' after triple")


def _parse_data_block(sc: _UpdateScanner) -> set[Quad]:
    sc.skip_ws()
    if sc.peek() != "{":
        raise sc.error("expected '{' after DATA")
    sc.pos += 1
    sc.skip_ws()
    mark = sc.pos
    if sc.peek().isascii() and sc.peek().isalpha():
        word = sc.scan_keyword()
        if word.upper() == "GRAPH":
            sc.skip_ws()
            if sc.peek() in ("?", "$"):
                raise UnsupportedConstruct("variable graph labels are not allowed")
            if sc.peek() == "_":
                raise UnsupportedConstruct("blank node graph labels are not allowed")
            graph = sc.scan_iriref("graph label")
            sc.skip_ws()
            if sc.peek() != "{":
                raise sc.error("expected '{' after GRAPH <iri>")
            sc.pos += 1
            quads = _parse_triple_lines(sc, graph)
            sc.pos += 1  # inner '}'
            sc.skip_ws()
            if sc.peek() != "}":
                raise sc.error("expected '}' closing the DATA block")
            sc.pos += 1
            return quads
        sc.pos = mark  # not GRAPH; re-scan as a triple line
    quads = _parse_triple_lines(sc, DEFAULT_GRAPH)
    sc.pos += 1  # closing '}'
    return quads


def parse_update_units(text: str) -> list[tuple[str, frozenset[Quad]]]:
    """Parse update text into ("DELETE"|"INSERT", quads) units, in order.

    This is the raw form: units may target several graphs, which stores
    need when one request carries both data and provenance writes.
    """
    sc = _UpdateScanner(text)
    units: list[tuple[str, frozenset[Quad]]] = []
    sc.skip_ws()
    while not sc.at_end():
        at = sc.pos
        verb = sc.scan_keyword().upper()
        if verb in ("DELETE", "INSERT"):
            sc.skip_ws()
            word = sc.scan_keyword().upper() if (sc.peek().isascii() and sc.peek().isalpha()) else ""
            if word != "DATA":
                raise UnsupportedConstruct(
                    f"only {verb} DATA is supported, not {verb} {word or sc.peek()!r}"
                )
            units.append((verb, frozenset(_parse_data_block(sc))))
        elif verb in _REFUSED_KEYWORDS:
            raise UnsupportedConstruct(f"{verb} is outside the restricted update grammar")
        else:
            raise sc.error(f"unrecognized keyword {verb!r}", at)
        sc.skip_ws()
        if sc.at_end():
            break
        if sc.peek() != ";":
            raise sc.error("expected ';' between update units")
        sc.pos += 1
        sc.skip_ws()
    return units


def parse_update_query(text: str) -> ChangeSet:
    """Parse restricted update text back into a changeset.

    Accepted grammar: `("DELETE DATA" | "INSERT DATA") "{" block "}"` units
    joined by ";", where a block is bare triple lines or one GRAPH group.
    Keywords are case-insensitive and whitespace is free-form. WHERE
    clauses, PREFIX declarations, variables, and blank nodes are refused
    with UnsupportedConstruct.
    """
    deletions: set[Quad] = set()
    additions: set[Quad] = set()
    for verb, quads in parse_update_units(text):
        (deletions if verb == "DELETE" else additions).update(quads)
    return ChangeSet(deletions=deletions, additions=additions)


def apply_to_state(state: EntityState, cs: ChangeSet) -> EntityState:
    """(state \\ deletions) | additions, keeping only the entity's own triples."""
    kept = state.triples - cs.deletion_triples()
    added = {t for t in cs.addition_triples() if t.subject == state.entity}
    return EntityState(state.entity, kept | added)


def materialize(current: EntityState, later_update_queries: Sequence[str],
                lenient: bool = False) -> EntityState:
    """Rewind `current` through the update queries of every later snapshot.

    `later_update_queries` must be ordered newest first. Each query is
    parsed, inverted, and applied. In strict mode an inverted deletion that
    is absent from the running state raises HistoryCorrupt; with
    lenient=True it is logged and skipped instead.
    """
    state = current
    for query in later_update_queries:
        cs = invert(parse_update_query(query))
        missing = cs.deletion_triples() - state.triples
        if missing:
            detail = (f"{len(missing)} inverted deletion(s) absent from the state of "
                      f"{state.entity.value}")
            if not lenient:
                raise HistoryCorrupt(detail)
            log.warning("%s; continuing (lenient mode)", detail)
        state = apply_to_state(state, cs)
    return state
