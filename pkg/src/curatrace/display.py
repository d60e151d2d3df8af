"""YAML display configuration and presentation-value resolution.

The config gives curator-friendly labels per class and property, controls
visibility, lets a property's rendering be delegated to a SPARQL query
(with the literal token [[subject]] standing in for the entity), and names
order predicates for properties whose values form a linked chain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

import yaml

from . import rdf
from .errors import ConfigError, OrderBranch, OrderCycle, OrderDisconnected
from .rdf import DEFAULT_GRAPH, GraphName, Iri, Literal, Term

SUBJECT_TOKEN = "[[subject]]"

_VAR_TOKEN = re.compile(r"[?$]([A-Za-z_][A-Za-z0-9_]*)")
_SELECT_HEAD = re.compile(r"\bselect\b(?P<proj>.*?)(?:\bwhere\b|\{)", re.IGNORECASE | re.DOTALL)


@dataclass(frozen=True)
class PropertyDisplay:
    path: Iri
    label: str
    displayed: bool = True
    value_query: Optional[str] = None
    order_predicate: Optional[Iri] = None


@dataclass(frozen=True)
class ClassDisplay:
    iri: Iri
    label: str
    properties: tuple[PropertyDisplay, ...] = ()

    def property_for(self, path: Iri) -> Optional[PropertyDisplay]:
        for prop in self.properties:
            if prop.path == path:
                return prop
        return None


@dataclass(frozen=True)
class DisplayConfig:
    classes: dict[Iri, ClassDisplay] = field(default_factory=dict)

    def class_label(self, iri: Iri) -> Optional[str]:
        entry = self.classes.get(iri)
        return entry.label if entry else None

    def property_for(self, rdf_types: Iterable[Iri], path: Iri) -> Optional[PropertyDisplay]:
        """First configured property entry for the path among the entity's types."""
        for t in sorted(rdf_types, key=lambda i: i.value):
            entry = self.classes.get(t)
            if entry is None:
                continue
            prop = entry.property_for(path)
            if prop is not None:
                return prop
        return None

    def is_empty(self) -> bool:
        return not self.classes


def _fail(message: str, path: str):
    raise ConfigError(message, path=path)


def _require_mapping(node, path: str, allowed: set[str]) -> dict:
    if not isinstance(node, dict):
        _fail("expected a mapping", path)
    for key in node:
        if key not in allowed:
            _fail(f"unknown key {key!r}", path)
    return node


def _require_str(node, path: str, allow_empty: bool = False) -> str:
    if not isinstance(node, str) or (not allow_empty and not node.strip()):
        _fail("expected a non-empty string", path)
    return node


def _require_iri(node, path: str) -> Iri:
    text = _require_str(node, path)
    try:
        return Iri(text)
    except ValueError as exc:
        _fail(str(exc), path)


def _check_value_query(query: str, path: str) -> str:
    if SUBJECT_TOKEN not in query:
        _fail(f"value_query must contain the {SUBJECT_TOKEN} placeholder", path)
    head = _SELECT_HEAD.search(query)
    if head is None:
        _fail("value_query must be a SELECT query", path)
    projection = head.group("proj")
    if "*" in projection:
        _fail("value_query must select exactly one named variable, not *", path)
    variables = {m.group(1) for m in _VAR_TOKEN.finditer(projection)}
    if len(variables) != 1:
        _fail(f"value_query must select exactly one variable, found {len(variables)}", path)
    return query


def _parse_property(node, path: str) -> PropertyDisplay:
    node = _require_mapping(node, path, {"path", "label", "displayed", "value_query",
                                         "order_predicate"})
    if "path" not in node:
        _fail("missing required key 'path'", path)
    if "label" not in node:
        _fail("missing required key 'label'", path)
    displayed = node.get("displayed", True)
    if not isinstance(displayed, bool):
        _fail("'displayed' must be a boolean", f"{path}.displayed")
    value_query = node.get("value_query")
    if value_query is not None:
        value_query = _check_value_query(
            _require_str(value_query, f"{path}.value_query"), f"{path}.value_query")
    order_predicate = node.get("order_predicate")
    if order_predicate is not None:
        order_predicate = _require_iri(order_predicate, f"{path}.order_predicate")
    return PropertyDisplay(
        path=_require_iri(node["path"], f"{path}.path"),
        label=_require_str(node["label"], f"{path}.label"),
        displayed=displayed,
        value_query=value_query,
        order_predicate=order_predicate,
    )


def _parse_class(node, path: str) -> ClassDisplay:
    node = _require_mapping(node, path, {"iri", "label", "properties"})
    if "iri" not in node:
        _fail("missing required key 'iri'", path)
    if "label" not in node:
        _fail("missing required key 'label'", path)
    raw_props = node.get("properties", [])
    if raw_props is None:
        raw_props = []
    if not isinstance(raw_props, list):
        _fail("'properties' must be a list", f"{path}.properties")
    properties = tuple(
        _parse_property(p, f"{path}.properties[{i}]") for i, p in enumerate(raw_props)
    )
    seen = set()
    for prop in properties:
        if prop.path in seen:
            _fail(f"duplicate property path {prop.path.value}", f"{path}.properties")
        seen.add(prop.path)
    return ClassDisplay(
        iri=_require_iri(node["iri"], f"{path}.iri"),
        label=_require_str(node["label"], f"{path}.label"),
        properties=properties,
    )


def load_display_config(yaml_text: str) -> DisplayConfig:
    """Parse and fully validate the YAML; never returns a partial config."""
    try:
        document = yaml.safe_load(yaml_text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}", path="$") from exc
    if document is None:
        return DisplayConfig()
    document = _require_mapping(document, "$", {"classes"})
    raw_classes = document.get("classes", [])
    if raw_classes is None:
        raw_classes = []
    if not isinstance(raw_classes, list):
        _fail("'classes' must be a list", "$.classes")
    classes: dict[Iri, ClassDisplay] = {}
    for i, node in enumerate(raw_classes):
        entry = _parse_class(node, f"classes[{i}]")
        if entry.iri in classes:
            _fail(f"class {entry.iri.value} configured twice", f"classes[{i}].iri")
        classes[entry.iri] = entry
    return DisplayConfig(classes)


def _value_text(term: Term) -> str:
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, Iri):
        return term.value
    return term.label


def display_value(store, entity: Iri, path: Iri, prop: Optional[PropertyDisplay],
                  data_graph: GraphName = DEFAULT_GRAPH) -> list[str]:
    """Presentation strings for one property of one entity.

    With a configured value_query the endpoint's answers are returned
    verbatim; otherwise each object's N-Triples surface form is used.
    """
    if prop is not None and prop.value_query is not None:
        query = prop.value_query.replace(SUBJECT_TOKEN, rdf.term_text(entity))
        rows = store.select(query)
        return sorted(_value_text(v) for row in rows for v in row.values())
    state = store.fetch_entity_state(entity, data_graph)
    return sorted(rdf.term_text(o) for o in state.objects(path))


def ordered_values(store, entity: Iri, path: Iri, order_predicate: Iri,
                   data_graph: GraphName = DEFAULT_GRAPH) -> list[Term]:
    """Sibling values of (entity, path) sorted by their successor chain.

    The siblings must form one linear chain under order_predicate: a unique
    head, at most one successor each, no cycles.
    """
    siblings = store.fetch_entity_state(entity, data_graph).objects(path)
    if not siblings:
        return []
    successor: dict[Term, Term] = {}
    has_predecessor: set[Term] = set()
    for value in siblings:
        if not isinstance(value, Iri):
            continue
        nexts = store.fetch_entity_state(value, data_graph).objects(order_predicate) & siblings
        if len(nexts) > 1:
            raise OrderBranch(
                f"{value.value} has {len(nexts)} successors among the values of {path.value}"
            )
        if nexts:
            successor[value] = next(iter(nexts))
            has_predecessor.add(successor[value])
    heads = [v for v in siblings if v not in has_predecessor]
    if not heads:
        raise OrderCycle(f"every value of {path.value} has a predecessor")
    if len(heads) > 1:
        raise OrderDisconnected(
            f"{len(heads)} chain heads among the values of {path.value}"
        )
    chain = [heads[0]]
    seen = {heads[0]}
    node = heads[0]
    while node in successor:
        node = successor[node]
        if node in seen:
            raise OrderCycle(f"ordering chain for {path.value} revisits {rdf.term_text(node)}")
        seen.add(node)
        chain.append(node)
    if len(chain) != len(siblings):
        raise OrderDisconnected(
            f"{len(siblings) - len(chain)} value(s) of {path.value} unreachable from the head"
        )
    return chain
