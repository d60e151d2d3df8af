"""Storage backends: an embedded in-memory quad store and a SPARQL 1.1
Protocol client, behind one contract.

A backend offers four capabilities: select, update, fetch_entity_state,
and contains. The engine talks SPARQL text to both; the memory store
evaluates only the restricted forms the engine itself emits (single-pattern
SELECTs and DATA updates), while the remote store forwards anything.
"""

from __future__ import annotations

import re
import threading
from contextlib import contextmanager
from typing import Optional, Protocol, Union

import requests

from . import rdf
from .delta import _UpdateScanner, parse_update_units, to_update_query
from .errors import QueryError, TransportError, UnsupportedQuery
from .rdf import DEFAULT_GRAPH, Blank, EntityState, GraphName, Iri, Literal, Quad, Term

Row = dict[str, Term]


class StoreBackend(Protocol):
    def select(self, query: str) -> list[Row]: ...

    def update(self, update_text: str) -> None: ...

    def fetch_entity_state(self, entity: Iri, data_graph: GraphName = DEFAULT_GRAPH) -> EntityState: ...

    def contains(self, quad: Quad) -> bool: ...


def fetch_entity_state(store: StoreBackend, entity: Iri,
                       data_graph: GraphName = DEFAULT_GRAPH) -> EntityState:
    return store.fetch_entity_state(entity, data_graph)


def apply_changeset(store: StoreBackend, cs) -> None:
    """Apply a changeset as one update request (deletions, then additions)."""
    text = to_update_query(cs)
    if text:
        store.update(text)


class _RWLock:
    """Multi-reader/single-writer lock; writers wait for a quiet store."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writing = False

    @contextmanager
    def read(self):
        with self._cond:
            self._cond.wait_for(lambda: not self._writing)
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                self._cond.notify_all()

    @contextmanager
    def write(self):
        with self._cond:
            self._cond.wait_for(lambda: not self._writing and self._readers == 0)
            self._writing = True
        try:
            yield
        finally:
            with self._cond:
                self._writing = False
                self._cond.notify_all()


class _Pattern:
    """One parsed triple/quad pattern: each slot a Term or a variable name."""

    __slots__ = ("graph", "subject", "predicate", "object")

    def __init__(self, graph, subject, predicate, object):
        self.graph = graph
        self.subject = subject
        self.predicate = predicate
        self.object = object


_VAR = re.compile(r"[?$]([A-Za-z_][A-Za-z0-9_]*)")


def _parse_select(query: str) -> tuple[list[str], _Pattern]:
    """Parse the engine's restricted SELECT form.

    SELECT ?a [?b ...] WHERE { [GRAPH (<g>|?g) {] s p o [.] [}] }
    where each of s/p/o is a variable, IRI, or literal.
    """
    sc = _UpdateScanner(query)
    sc.skip_ws()

    def keyword():
        start = sc.pos
        while not sc.at_end() and sc.peek().isascii() and sc.peek().isalpha():
            sc.pos += 1
        return query[start:sc.pos]

    def variable() -> str:
        m = _VAR.match(query, sc.pos)
        if not m:
            raise sc.error("expected a variable")
        sc.pos = m.end()
        return m.group(1)

    def slot(position: str):
        c = sc.peek()
        if c in ("?", "$"):
            return variable()
        if c == "<":
            return sc.scan_iriref(position)
        if c == '"' and position == "object":
            return sc.scan_literal()
        raise UnsupportedQuery(f"unsupported {position} token in SELECT pattern", query)

    if keyword().upper() != "SELECT":
        raise UnsupportedQuery("memory store only evaluates SELECT queries", query)
    sc.skip_ws()
    out_vars = []
    while sc.peek() in ("?", "$"):
        out_vars.append(variable())
        sc.skip_ws()
    if not out_vars:
        raise UnsupportedQuery("SELECT * / expressions are not supported", query)
    if keyword().upper() != "WHERE":
        raise UnsupportedQuery("expected WHERE", query)
    sc.skip_ws()
    if sc.peek() != "{":
        raise UnsupportedQuery("expected '{' after WHERE", query)
    sc.pos += 1
    sc.skip_ws()

    graph = DEFAULT_GRAPH
    wrapped = False
    mark = sc.pos
    word = keyword()
    if word.upper() == "GRAPH":
        wrapped = True
        sc.skip_ws()
        graph = variable() if sc.peek() in ("?", "$") else sc.scan_iriref("graph label")
        sc.skip_ws()
        if sc.peek() != "{":
            raise UnsupportedQuery("expected '{' after GRAPH", query)
        sc.pos += 1
        sc.skip_ws()
    else:
        sc.pos = mark

    s = slot("subject")
    sc.skip_ws()
    p = slot("predicate")
    sc.skip_ws()
    o = slot("object")
    sc.skip_ws()
    if sc.peek() == ".":
        sc.pos += 1
        sc.skip_ws()
    for _ in range(2 if wrapped else 1):
        if sc.peek() != "}":
            raise UnsupportedQuery("memory store evaluates exactly one pattern", query)
        sc.pos += 1
        sc.skip_ws()
    if not sc.at_end():
        raise UnsupportedQuery("trailing content after pattern", query)
    return out_vars, _Pattern(graph, s, p, o)


class MemoryStore:
    """Embedded quad store with multi-reader/single-writer semantics.

    Supports the restricted DATA update grammar and the single-pattern
    SELECT form; anything richer raises UnsupportedQuery. State is
    process-local and lost on exit.
    """

    def __init__(self):
        self._graphs: dict[GraphName, set[tuple]] = {}
        self._lock = _RWLock()

    # -- write path ------------------------------------------------------

    def update(self, update_text: str) -> None:
        units = parse_update_units(update_text)  # parse outside the lock
        with self._lock.write():
            for verb, quads in units:
                for q in quads:
                    bucket = self._graphs.setdefault(q.graph, set())
                    key = (q.subject, q.predicate, q.object)
                    if verb == "DELETE":
                        bucket.discard(key)
                    else:
                        bucket.add(key)

    def load_quads(self, quads) -> None:
        """Bulk-insert parsed quads, bypassing update-text round-tripping."""
        with self._lock.write():
            for q in quads:
                self._graphs.setdefault(q.graph, set()).add((q.subject, q.predicate, q.object))

    # -- read path -------------------------------------------------------

    def select(self, query: str) -> list[Row]:
        out_vars, pat = _parse_select(query)
        rows: list[Row] = []
        with self._lock.read():
            if isinstance(pat.graph, str):
                candidates = [(g, set(b)) for g, b in self._graphs.items()]
            else:
                candidates = [(pat.graph, set(self._graphs.get(pat.graph, ())))]
        for graph, bucket in candidates:
            for s, p, o in bucket:
                binding: Row = {}
                ok = True
                for slot, value in ((pat.subject, s), (pat.predicate, p), (pat.object, o)):
                    if isinstance(slot, str):
                        if slot in binding and binding[slot] != value:
                            ok = False
                            break
                        binding[slot] = value
                    elif slot != value:
                        ok = False
                        break
                if not ok:
                    continue
                if isinstance(pat.graph, str):
                    if graph is DEFAULT_GRAPH:
                        continue
                    binding[pat.graph] = graph
                missing = [v for v in out_vars if v not in binding]
                if missing:
                    raise UnsupportedQuery(f"unbound result variable ?{missing[0]}", query)
                rows.append({v: binding[v] for v in out_vars})
        return rows

    def fetch_entity_state(self, entity: Iri, data_graph: GraphName = DEFAULT_GRAPH) -> EntityState:
        with self._lock.read():
            bucket = set(self._graphs.get(data_graph, ()))
        return EntityState(
            entity,
            (rdf.Triple(s, p, o) for s, p, o in bucket if s == entity),
        )

    def contains(self, quad: Quad) -> bool:
        with self._lock.read():
            return (quad.subject, quad.predicate, quad.object) in self._graphs.get(quad.graph, set())

    def all_quads(self) -> set[Quad]:
        with self._lock.read():
            return {
                Quad(s, p, o, g)
                for g, bucket in self._graphs.items()
                for s, p, o in bucket
            }

    def dump_nquads(self) -> str:
        return rdf.serialize_nquads(self.all_quads())


def _term_from_json(node: dict) -> Term:
    kind = node.get("type")
    if kind == "uri":
        return Iri(node["value"])
    if kind in ("literal", "typed-literal"):
        lang = node.get("xml:lang")
        if lang:
            return Literal(node["value"], language=lang)
        dt = node.get("datatype")
        return Literal(node["value"], datatype=dt) if dt else Literal(node["value"])
    if kind == "bnode":
        return Blank(node["value"])
    raise QueryError(f"unknown term type in results: {kind!r}")


class RemoteStore:
    """SPARQL 1.1 Protocol client for query and update endpoints.

    Entity states are re-fetched on every call, never cached across edit
    pipelines.
    """

    def __init__(self, query_endpoint: str, update_endpoint: str,
                 auth: Optional[tuple[str, str]] = None, timeout: float = 30.0):
        self.query_endpoint = query_endpoint
        self.update_endpoint = update_endpoint
        self.auth = auth
        self.timeout = timeout

    def _post(self, url: str, body: str, content_type: str, accept: str) -> requests.Response:
        try:
            response = requests.post(
                url,
                data=body.encode("utf-8"),
                headers={"Content-Type": content_type, "Accept": accept},
                auth=self.auth,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"endpoint {url} unreachable: {exc}") from exc
        if not 200 <= response.status_code < 300:
            raise TransportError(
                f"endpoint {url} returned {response.status_code}: {response.text[:500]}"
            )
        return response

    def _query_json(self, query: str) -> dict:
        response = self._post(self.query_endpoint, query,
                              "application/sparql-query", "application/sparql-results+json")
        try:
            return response.json()
        except ValueError as exc:
            raise QueryError(f"endpoint returned malformed JSON results: {exc}", query) from exc

    def select(self, query: str) -> list[Row]:
        payload = self._query_json(query)
        try:
            bindings = payload["results"]["bindings"]
            return [{var: _term_from_json(node) for var, node in row.items()} for row in bindings]
        except (KeyError, TypeError, ValueError) as exc:
            raise QueryError(f"unexpected result document: {exc}", query) from exc

    def ask(self, query: str) -> bool:
        payload = self._query_json(query)
        if "boolean" not in payload:
            raise QueryError("ASK result lacks boolean field", query)
        return bool(payload["boolean"])

    def update(self, update_text: str) -> None:
        self._post(self.update_endpoint, update_text, "application/sparql-update", "*/*")

    def fetch_entity_state(self, entity: Iri, data_graph: GraphName = DEFAULT_GRAPH) -> EntityState:
        pattern = f"{rdf.term_text(entity)} ?p ?o"
        if data_graph is DEFAULT_GRAPH:
            query = f"SELECT ?p ?o WHERE {{ {pattern} }}"
        else:
            query = f"SELECT ?p ?o WHERE {{ GRAPH {rdf.term_text(data_graph)} {{ {pattern} }} }}"
        rows = self.select(query)
        return EntityState(entity, (rdf.Triple(entity, row["p"], row["o"]) for row in rows))

    def contains(self, quad: Quad) -> bool:
        triple = (f"{rdf.term_text(quad.subject)} {rdf.term_text(quad.predicate)} "
                  f"{rdf.term_text(quad.object)}")
        if quad.graph is DEFAULT_GRAPH:
            return self.ask(f"ASK {{ {triple} }}")
        return self.ask(f"ASK {{ GRAPH {rdf.term_text(quad.graph)} {{ {triple} }} }}")


Store = Union[MemoryStore, RemoteStore]
