"""SHACL shapes graph -> editing form schema, plus state validation.

Supported subset: node shapes with sh:targetClass and sh:property, property
shapes with a direct-IRI sh:path and sh:minCount / sh:maxCount /
sh:datatype / sh:class / sh:in / sh:hasValue. Anything else in the sh:
namespace fails loudly at load time; silently ignoring constraints would
mean validating less than the curator asked for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional

from . import rdf
from .errors import MalformedList, UnsupportedShape
from .rdf import EntityState, Iri, Literal, Quad, Term

SH = "http://www.w3.org/ns/shacl#"
SH_NODE_SHAPE = Iri(SH + "NodeShape")
SH_PROPERTY_SHAPE = Iri(SH + "PropertyShape")
SH_TARGET_CLASS = Iri(SH + "targetClass")
SH_PROPERTY = Iri(SH + "property")
SH_PATH = Iri(SH + "path")
SH_MIN_COUNT = Iri(SH + "minCount")
SH_MAX_COUNT = Iri(SH + "maxCount")
SH_DATATYPE = Iri(SH + "datatype")
SH_CLASS = Iri(SH + "class")
SH_IN = Iri(SH + "in")
SH_HAS_VALUE = Iri(SH + "hasValue")

RDF_TYPE = Iri(rdf.RDF_TYPE)
RDF_FIRST = Iri(rdf.RDF_FIRST)
RDF_REST = Iri(rdf.RDF_REST)
RDF_NIL = Iri(rdf.RDF_NIL)

_NODE_SHAPE_PREDICATES = {SH_TARGET_CLASS, SH_PROPERTY}
_PROPERTY_SHAPE_PREDICATES = {
    SH_PATH, SH_MIN_COUNT, SH_MAX_COUNT, SH_DATATYPE, SH_CLASS, SH_IN, SH_HAS_VALUE
}


@dataclass(frozen=True)
class PropertyConstraint:
    """Editing constraints for one predicate of one class."""

    path: Iri
    min_count: int = 0
    max_count: Optional[int] = None
    datatype: Optional[Iri] = None
    value_class: Optional[Iri] = None
    allowed_values: Optional[tuple[Term, ...]] = None

    def __post_init__(self):
        if self.min_count < 0:
            raise ValueError("min_count must be >= 0")
        if self.max_count is not None and self.max_count < self.min_count:
            raise ValueError("max_count below min_count")
        if self.datatype is not None and self.value_class is not None:
            raise ValueError("at most one of datatype / value_class may be set")


@dataclass(frozen=True)
class FormSchema:
    """Target class IRI -> ordered property constraints (unique paths)."""

    classes: dict[Iri, tuple[PropertyConstraint, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for cls, constraints in self.classes.items():
            paths = [c.path for c in constraints]
            if len(set(paths)) != len(paths):
                raise ValueError(f"duplicate constraint path for class {cls.value}")

    def entries_for(self, rdf_types: Iterable[Iri]) -> list[tuple[Iri, tuple[PropertyConstraint, ...]]]:
        matching = sorted((t for t in rdf_types if t in self.classes), key=lambda t: t.value)
        return [(t, self.classes[t]) for t in matching]

    def is_empty(self) -> bool:
        return not self.classes


class ViolationKind(str, Enum):
    MIN_COUNT = "MinCount"
    MAX_COUNT = "MaxCount"
    DATATYPE = "Datatype"
    CLASS_MEMBERSHIP = "ClassMembership"
    NOT_IN_LIST = "NotInList"


@dataclass(frozen=True)
class Violation:
    focus: Iri
    path: Iri
    kind: ViolationKind
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def conforms(self) -> bool:
        return not self.violations


class _ShapeIndex:
    def __init__(self, quads: Iterable[Quad]):
        self.po: dict = {}
        for q in quads:
            self.po.setdefault(q.subject, []).append((q.predicate, q.object))

    def objects(self, subject, predicate) -> list[Term]:
        return [o for p, o in self.po.get(subject, []) if p == predicate]

    def one(self, subject, predicate, what: str) -> Optional[Term]:
        values = self.objects(subject, predicate)
        if len(values) > 1:
            raise UnsupportedShape(f"{what} given {len(values)} times on one shape")
        return values[0] if values else None


def _walk_list(index: _ShapeIndex, head: Term, context: str) -> list[Term]:
    items: list[Term] = []
    seen = set()
    node = head
    while node != RDF_NIL:
        if not isinstance(node, (Iri, rdf.Blank)):
            raise MalformedList(f"{context}: list node is a literal")
        if node in seen:
            raise MalformedList(f"{context}: list is cyclic")
        seen.add(node)
        first = index.objects(node, RDF_FIRST)
        rest = index.objects(node, RDF_REST)
        if len(first) != 1 or len(rest) != 1:
            raise MalformedList(f"{context}: list node lacks exactly one rdf:first/rdf:rest")
        items.append(first[0])
        node = rest[0]
    return items


def _int_literal(term: Term, what: str) -> int:
    if not isinstance(term, Literal):
        raise UnsupportedShape(f"{what} must be an integer literal")
    try:
        return int(term.lexical)
    except ValueError:
        raise UnsupportedShape(f"{what} is not an integer: {term.lexical!r}") from None


def _check_vocabulary(index: _ShapeIndex, subject, allowed: set[Iri], context: str):
    for p, _ in index.po.get(subject, []):
        if p == RDF_TYPE or not p.value.startswith(SH):
            continue
        if p not in allowed:
            raise UnsupportedShape(f"{context}: unsupported SHACL construct {p.value}")


def _property_constraint(index: _ShapeIndex, shape) -> PropertyConstraint:
    context = f"property shape {rdf.term_text(shape)}"
    _check_vocabulary(index, shape, _PROPERTY_SHAPE_PREDICATES, context)
    path = index.one(shape, SH_PATH, "sh:path")
    if path is None:
        raise UnsupportedShape(f"{context}: missing sh:path")
    if not isinstance(path, Iri):
        raise UnsupportedShape(f"{context}: only direct IRI paths are supported")
    min_term = index.one(shape, SH_MIN_COUNT, "sh:minCount")
    max_term = index.one(shape, SH_MAX_COUNT, "sh:maxCount")
    dt = index.one(shape, SH_DATATYPE, "sh:datatype")
    cls = index.one(shape, SH_CLASS, "sh:class")
    in_head = index.one(shape, SH_IN, "sh:in")
    has_value = index.one(shape, SH_HAS_VALUE, "sh:hasValue")
    if dt is not None and not isinstance(dt, Iri):
        raise UnsupportedShape(f"{context}: sh:datatype must be an IRI")
    if cls is not None and not isinstance(cls, Iri):
        raise UnsupportedShape(f"{context}: sh:class must be an IRI")
    if dt is not None and cls is not None:
        raise UnsupportedShape(f"{context}: sh:datatype and sh:class together are contradictory")
    if in_head is not None and has_value is not None:
        raise UnsupportedShape(f"{context}: sh:in combined with sh:hasValue is not supported")

    min_count = _int_literal(min_term, "sh:minCount") if min_term is not None else 0
    max_count = _int_literal(max_term, "sh:maxCount") if max_term is not None else None
    allowed: Optional[tuple[Term, ...]] = None
    if in_head is not None:
        allowed = tuple(_walk_list(index, in_head, context))
    if has_value is not None:
        allowed = (has_value,)
        min_count = max(min_count, 1)
    try:
        return PropertyConstraint(path, min_count, max_count,
                                  datatype=dt, value_class=cls, allowed_values=allowed)
    except ValueError as exc:
        raise UnsupportedShape(f"{context}: {exc}") from exc


def _merge(a: PropertyConstraint, b: PropertyConstraint) -> PropertyConstraint:
    """Conjunction of two constraints on the same path (most restrictive wins)."""
    def single(x, y, what):
        if x is not None and y is not None and x != y:
            raise UnsupportedShape(f"conflicting {what} for path {a.path.value}")
        return x if x is not None else y

    maxes = [m for m in (a.max_count, b.max_count) if m is not None]
    allowed = single(a.allowed_values, b.allowed_values, "sh:in/sh:hasValue")
    try:
        return PropertyConstraint(
            a.path,
            max(a.min_count, b.min_count),
            min(maxes) if maxes else None,
            datatype=single(a.datatype, b.datatype, "sh:datatype"),
            value_class=single(a.value_class, b.value_class, "sh:class"),
            allowed_values=allowed,
        )
    except ValueError as exc:
        raise UnsupportedShape(f"unsatisfiable constraints for path {a.path.value}: {exc}") from exc


def extract_schema(shapes: Iterable[Quad]) -> FormSchema:
    """Compile a shapes graph into a FormSchema; fails loudly outside the subset."""
    index = _ShapeIndex(shapes)
    by_class: dict[Iri, dict[Iri, PropertyConstraint]] = {}
    for subject, po in sorted(index.po.items(), key=lambda kv: rdf.term_text(kv[0])):
        targets = [o for p, o in po if p == SH_TARGET_CLASS]
        if not targets:
            continue
        _check_vocabulary(index, subject, _NODE_SHAPE_PREDICATES,
                          f"node shape {rdf.term_text(subject)}")
        constraints = []
        for prop_shape in index.objects(subject, SH_PROPERTY):
            constraints.append(_property_constraint(index, prop_shape))
        for target in targets:
            if not isinstance(target, Iri):
                raise UnsupportedShape("sh:targetClass must be an IRI")
            entry = by_class.setdefault(target, {})
            for c in constraints:
                entry[c.path] = _merge(entry[c.path], c) if c.path in entry else c
    return FormSchema({
        cls: tuple(sorted(entry.values(), key=lambda c: c.path.value))
        for cls, entry in by_class.items()
    })


TypeLookup = Callable[[Iri], set[Iri]]


def validate_state(state: EntityState, rdf_types: set[Iri], schema: FormSchema,
                   type_lookup: Optional[TypeLookup] = None) -> ValidationReport:
    """Check a candidate state against every schema entry its types match.

    Entities whose types match no entry conform vacuously. Value-class
    checks resolve object types through `type_lookup`; lookup failures
    surface as ClassMembership violations rather than errors.
    """
    lookup: TypeLookup = type_lookup or (lambda _: set())
    violations: list[Violation] = []
    for _, constraints in schema.entries_for(rdf_types):
        for c in constraints:
            values = sorted(state.objects(c.path), key=rdf.term_text)
            n = len(values)
            if n < c.min_count:
                violations.append(Violation(
                    state.entity, c.path, ViolationKind.MIN_COUNT,
                    f"{c.path.value}: {n} value(s), at least {c.min_count} required"))
            if c.max_count is not None and n > c.max_count:
                violations.append(Violation(
                    state.entity, c.path, ViolationKind.MAX_COUNT,
                    f"{c.path.value}: {n} value(s), at most {c.max_count} allowed"))
            for v in values:
                if c.datatype is not None and not (
                        isinstance(v, Literal) and v.datatype == c.datatype.value):
                    violations.append(Violation(
                        state.entity, c.path, ViolationKind.DATATYPE,
                        f"{rdf.term_text(v)} is not a literal of datatype {c.datatype.value}"))
                if c.value_class is not None:
                    ok = False
                    detail = "is not an IRI"
                    if isinstance(v, Iri):
                        try:
                            ok = c.value_class in lookup(v)
                            detail = f"is not an instance of {c.value_class.value}"
                        except Exception as exc:  # noqa: BLE001
                            detail = f"type lookup failed: {exc}"
                    if not ok:
                        violations.append(Violation(
                            state.entity, c.path, ViolationKind.CLASS_MEMBERSHIP,
                            f"{rdf.term_text(v)} {detail}"))
                if c.allowed_values is not None and v not in c.allowed_values:
                    violations.append(Violation(
                        state.entity, c.path, ViolationKind.NOT_IN_LIST,
                        f"{rdf.term_text(v)} is not among the permitted values"))
    violations.sort(key=lambda v: (v.path.value, v.kind.value, v.message))
    return ValidationReport(tuple(violations))
