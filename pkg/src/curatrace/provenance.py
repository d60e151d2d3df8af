"""Snapshot lifecycle and per-entity provenance timelines.

Every entity change is recorded as a numbered snapshot in the entity's own
provenance named graph (entity IRI + "/prov/"). A snapshot carries exactly:
its type, the entity link, generation/invalidation times, the responsible
agent, an optional primary source, the predecessor link, and the update
query that produced it. Snapshot #1 (creation) has no update query and no
predecessor; a deletion is marked by invalidated_at == generated_at on the
final snapshot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional, Sequence, Union

from . import delta, rdf
from .errors import (
    AlreadyVersioned,
    EmptyDiff,
    HistoryCorrupt,
    NoHistory,
    UnknownVersion,
)
from .rdf import DEFAULT_GRAPH, EntityState, GraphName, Iri, Literal, Quad, Term

PROV = "http://www.w3.org/ns/prov#"
OCO = "https://w3id.org/oc/ontology/"

PROV_ENTITY = Iri(PROV + "Entity")
SPECIALIZATION_OF = Iri(PROV + "specializationOf")
GENERATED_AT = Iri(PROV + "generatedAtTime")
INVALIDATED_AT = Iri(PROV + "invalidatedAtTime")
ATTRIBUTED_TO = Iri(PROV + "wasAttributedTo")
PRIMARY_SOURCE = Iri(PROV + "hasPrimarySource")
DERIVED_FROM = Iri(PROV + "wasDerivedFrom")
HAS_UPDATE_QUERY = Iri(OCO + "hasUpdateQuery")
RDF_TYPE = Iri(rdf.RDF_TYPE)

Agent = Union[Iri, Literal]

_SNAPSHOT_SUFFIX = re.compile(r"^(?P<entity>.+)/prov/se/(?P<n>[1-9][0-9]*)$")


def format_timestamp(t: datetime) -> str:
    """xsd:dateTime text, UTC, second precision, trailing Z."""
    if t.tzinfo is None:
        t = t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(text: str) -> datetime:
    try:
        return datetime.fromisoformat(text.replace("Z", "+00:00")).astimezone(timezone.utc)
    except ValueError as exc:
        raise HistoryCorrupt(f"unparseable timestamp literal: {text!r}") from exc


def _normalize(t: datetime) -> datetime:
    return parse_timestamp(format_timestamp(t))


def agent_term(text: str) -> Agent:
    """IRI if the text looks like one, plain literal otherwise."""
    try:
        return Iri(text)
    except ValueError:
        return Literal(text)


def snapshot_iri(entity: Iri, n: int) -> Iri:
    if n < 1:
        raise ValueError(f"snapshot numbers start at 1, got {n}")
    return Iri(f"{entity.value}/prov/se/{n}")


def prov_graph_iri(entity: Iri) -> Iri:
    return Iri(f"{entity.value}/prov/")


@dataclass(frozen=True)
class Snapshot:
    """One provenance record for one version of one entity."""

    snapshot_iri: Iri
    entity_iri: Iri
    number: int
    generated_at: datetime
    responsible_agent: Agent
    invalidated_at: Optional[datetime] = None
    primary_source: Optional[Iri] = None
    derived_from: Optional[Iri] = None
    update_query: Optional[str] = None

    def __post_init__(self):
        if self.number < 1:
            raise ValueError("snapshot number must be >= 1")
        is_creation = self.number == 1
        if is_creation != (self.update_query is None) or is_creation != (self.derived_from is None):
            raise ValueError(
                "snapshot #1 must lack update query and predecessor; later ones must have both"
            )
        if self.invalidated_at is not None and self.invalidated_at < self.generated_at:
            raise ValueError("invalidated_at precedes generated_at")
        if self.snapshot_iri != snapshot_iri(self.entity_iri, self.number):
            raise ValueError(
                f"snapshot IRI {self.snapshot_iri.value} does not encode "
                f"({self.entity_iri.value}, {self.number})"
            )

    def is_deletion_marker(self) -> bool:
        return self.invalidated_at is not None and self.invalidated_at == self.generated_at

    def invalidated(self, t: datetime) -> "Snapshot":
        return Snapshot(
            snapshot_iri=self.snapshot_iri,
            entity_iri=self.entity_iri,
            number=self.number,
            generated_at=self.generated_at,
            responsible_agent=self.responsible_agent,
            invalidated_at=_normalize(t),
            primary_source=self.primary_source,
            derived_from=self.derived_from,
            update_query=self.update_query,
        )


@dataclass(frozen=True)
class Timeline:
    """All snapshots of one entity, validated and ordered by number."""

    entity_iri: Iri
    snapshots: tuple[Snapshot, ...] = ()

    def __init__(self, entity_iri: Iri, snapshots: Sequence[Snapshot] = ()):
        object.__setattr__(self, "entity_iri", entity_iri)
        ordered = tuple(sorted(snapshots, key=lambda s: s.number))
        self._validate(entity_iri, ordered)
        object.__setattr__(self, "snapshots", ordered)

    @staticmethod
    def _validate(entity: Iri, ordered: tuple[Snapshot, ...]):
        numbers = [s.number for s in ordered]
        if len(set(numbers)) != len(numbers):
            raise HistoryCorrupt(f"duplicate snapshot numbers for {entity.value}: {numbers}")
        if numbers != list(range(1, len(numbers) + 1)):
            raise HistoryCorrupt(f"snapshot numbers not contiguous for {entity.value}: {numbers}")
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.generated_at < prev.generated_at:
                raise HistoryCorrupt(f"snapshot times regress at #{cur.number}")
            if cur.derived_from != prev.snapshot_iri:
                raise HistoryCorrupt(
                    f"broken derivation chain at #{cur.number} of {entity.value}"
                )
            if prev.invalidated_at is None:
                raise HistoryCorrupt(
                    f"snapshot #{prev.number} has a successor but no invalidation time"
                )
        for s in ordered:
            if s.entity_iri != entity:
                raise HistoryCorrupt(
                    f"snapshot {s.snapshot_iri.value} belongs to another entity"
                )
        if ordered:
            head = ordered[-1]
            if head.invalidated_at is not None and not head.is_deletion_marker():
                raise HistoryCorrupt(
                    f"head snapshot #{head.number} is invalidated but records no deletion"
                )

    def head(self) -> Optional[Snapshot]:
        return self.snapshots[-1] if self.snapshots else None

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)

    def __getitem__(self, number: int) -> Snapshot:
        if not 1 <= number <= len(self.snapshots):
            raise UnknownVersion(
                f"{self.entity_iri.value} has versions 1..{len(self.snapshots)}, not {number}"
            )
        return self.snapshots[number - 1]


def record_creation(state: EntityState, agent: Agent, t: datetime,
                    source: Optional[Iri] = None,
                    timeline: Optional[Timeline] = None) -> Snapshot:
    """Snapshot #1 for a fresh entity; refuses already-versioned entities."""
    if timeline is not None and len(timeline) > 0:
        raise AlreadyVersioned(f"{state.entity.value} already has snapshots")
    return Snapshot(
        snapshot_iri=snapshot_iri(state.entity, 1),
        entity_iri=state.entity,
        number=1,
        generated_at=_normalize(t),
        responsible_agent=agent,
        primary_source=source,
    )


def _next_snapshot(timeline: Timeline, entity: Iri) -> tuple[Snapshot, int]:
    head = timeline.head()
    if head is None:
        raise NoHistory(f"{entity.value} has no snapshots yet")
    return head, head.number + 1


def record_modification(old: EntityState, new: EntityState, agent: Agent, t: datetime,
                        timeline: Timeline, source: Optional[Iri] = None,
                        data_graph: GraphName = DEFAULT_GRAPH) -> Snapshot:
    """New head snapshot whose update query turns `old` into `new`."""
    cs = delta.diff(old, new, data_graph)
    if cs.is_empty():
        raise EmptyDiff(f"edit of {old.entity.value} changes nothing")
    head, number = _next_snapshot(timeline, old.entity)
    return Snapshot(
        snapshot_iri=snapshot_iri(old.entity, number),
        entity_iri=old.entity,
        number=number,
        generated_at=_normalize(t),
        responsible_agent=agent,
        primary_source=source,
        derived_from=head.snapshot_iri,
        update_query=delta.to_update_query(cs),
    )


def record_restore(current: EntityState, target: Snapshot, restored_state: EntityState,
                   agent: Agent, t: datetime, timeline: Timeline,
                   data_graph: GraphName = DEFAULT_GRAPH) -> Snapshot:
    """New head reproducing `restored_state`, citing `target` as primary source."""
    if target.entity_iri != current.entity:
        raise UnknownVersion(
            f"snapshot {target.snapshot_iri.value} does not belong to {current.entity.value}"
        )
    cs = delta.diff(current, restored_state, data_graph)
    if cs.is_empty():
        raise EmptyDiff(f"{current.entity.value} already equals the state of the target snapshot")
    head, number = _next_snapshot(timeline, current.entity)
    return Snapshot(
        snapshot_iri=snapshot_iri(current.entity, number),
        entity_iri=current.entity,
        number=number,
        generated_at=_normalize(t),
        responsible_agent=agent,
        primary_source=target.snapshot_iri,
        derived_from=head.snapshot_iri,
        update_query=delta.to_update_query(cs),
    )


def record_deletion(current: EntityState, agent: Agent, t: datetime, timeline: Timeline,
                    data_graph: GraphName = DEFAULT_GRAPH) -> Snapshot:
    """Deletion marker: removes every triple, invalidated the moment it is made."""
    head, number = _next_snapshot(timeline, current.entity)
    if current.is_empty():
        raise EmptyDiff(f"{current.entity.value} has no triples to delete")
    cs = delta.diff(current, EntityState(current.entity), data_graph)
    when = _normalize(t)
    return Snapshot(
        snapshot_iri=snapshot_iri(current.entity, number),
        entity_iri=current.entity,
        number=number,
        generated_at=when,
        invalidated_at=when,
        responsible_agent=agent,
        derived_from=head.snapshot_iri,
        update_query=delta.to_update_query(cs),
    )


def invalidation_quad(snapshot: Snapshot, t: datetime, prov_graph: Iri) -> Quad:
    """The single quad that stamps a predecessor as superseded at time t."""
    return Quad(
        snapshot.snapshot_iri,
        INVALIDATED_AT,
        Literal(format_timestamp(t), datatype=rdf.XSD_DATETIME),
        prov_graph,
    )


def snapshot_to_quads(s: Snapshot, prov_graph: Iri) -> set[Quad]:
    """Exactly the snapshot's provenance statements, nothing else."""
    si = s.snapshot_iri
    quads = {
        Quad(si, RDF_TYPE, PROV_ENTITY, prov_graph),
        Quad(si, SPECIALIZATION_OF, s.entity_iri, prov_graph),
        Quad(si, GENERATED_AT,
             Literal(format_timestamp(s.generated_at), datatype=rdf.XSD_DATETIME), prov_graph),
        Quad(si, ATTRIBUTED_TO, s.responsible_agent, prov_graph),
    }
    if s.invalidated_at is not None:
        quads.add(Quad(si, INVALIDATED_AT,
                       Literal(format_timestamp(s.invalidated_at), datatype=rdf.XSD_DATETIME),
                       prov_graph))
    if s.primary_source is not None:
        quads.add(Quad(si, PRIMARY_SOURCE, s.primary_source, prov_graph))
    if s.derived_from is not None:
        quads.add(Quad(si, DERIVED_FROM, s.derived_from, prov_graph))
    if s.update_query is not None:
        quads.add(Quad(si, HAS_UPDATE_QUERY, Literal(s.update_query), prov_graph))
    return quads


def _one(values: list[Term], what: str, snapshot: Iri, optional: bool = False):
    if len(values) > 1:
        raise HistoryCorrupt(f"{snapshot.value} has {len(values)} values for {what}")
    if not values:
        if optional:
            return None
        raise HistoryCorrupt(f"{snapshot.value} lacks {what}")
    return values[0]


def _snapshot_from_quads(snap_iri: Iri, entity: Iri, number: int,
                         po: list[tuple[Iri, Term]]) -> Snapshot:
    by_pred: dict[Iri, list[Term]] = {}
    for p, o in po:
        by_pred.setdefault(p, []).append(o)
    known = {RDF_TYPE, SPECIALIZATION_OF, GENERATED_AT, INVALIDATED_AT,
             ATTRIBUTED_TO, PRIMARY_SOURCE, DERIVED_FROM, HAS_UPDATE_QUERY}
    stray = set(by_pred) - known
    if stray:
        raise HistoryCorrupt(f"{snap_iri.value} carries foreign properties: "
                             + ", ".join(sorted(p.value for p in stray)))
    if _one(by_pred.get(RDF_TYPE, []), "rdf:type", snap_iri) != PROV_ENTITY:
        raise HistoryCorrupt(f"{snap_iri.value} is not typed prov:Entity")
    spec = _one(by_pred.get(SPECIALIZATION_OF, []), "specializationOf", snap_iri)
    if spec != entity:
        raise HistoryCorrupt(f"{snap_iri.value} specializes {spec}, expected {entity.value}")
    generated = _one(by_pred.get(GENERATED_AT, []), "generatedAtTime", snap_iri)
    invalidated = _one(by_pred.get(INVALIDATED_AT, []), "invalidatedAtTime", snap_iri, optional=True)
    agent = _one(by_pred.get(ATTRIBUTED_TO, []), "wasAttributedTo", snap_iri)
    source = _one(by_pred.get(PRIMARY_SOURCE, []), "hasPrimarySource", snap_iri, optional=True)
    derived = _one(by_pred.get(DERIVED_FROM, []), "wasDerivedFrom", snap_iri, optional=True)
    query = _one(by_pred.get(HAS_UPDATE_QUERY, []), "hasUpdateQuery", snap_iri, optional=True)
    for name, value in (("hasPrimarySource", source), ("wasDerivedFrom", derived)):
        if value is not None and not isinstance(value, Iri):
            raise HistoryCorrupt(f"{snap_iri.value}: {name} must be an IRI")
    try:
        return Snapshot(
            snapshot_iri=snap_iri,
            entity_iri=entity,
            number=number,
            generated_at=parse_timestamp(generated.lexical),
            invalidated_at=parse_timestamp(invalidated.lexical) if invalidated else None,
            responsible_agent=agent,
            primary_source=source,
            derived_from=derived,
            update_query=query.lexical if query is not None else None,
        )
    except (ValueError, AttributeError) as exc:
        raise HistoryCorrupt(f"{snap_iri.value}: {exc}") from exc


def load_timeline(store, entity: Iri) -> Timeline:
    """Read and validate every snapshot of the entity; empty if unversioned."""
    pg = prov_graph_iri(entity)
    rows = store.select(
        f"SELECT ?s ?p ?o WHERE {{ GRAPH {rdf.term_text(pg)} {{ ?s ?p ?o }} }}"
    )
    grouped: dict[Iri, list[tuple[Iri, Term]]] = {}
    for row in rows:
        grouped.setdefault(row["s"], []).append((row["p"], row["o"]))
    snapshots = []
    for snap_iri, po in grouped.items():
        if not isinstance(snap_iri, Iri):
            raise HistoryCorrupt(f"non-IRI subject in provenance graph of {entity.value}")
        m = _SNAPSHOT_SUFFIX.match(snap_iri.value)
        if not m or m.group("entity") != entity.value:
            raise HistoryCorrupt(
                f"unexpected subject {snap_iri.value} in provenance graph of {entity.value}"
            )
        snapshots.append(_snapshot_from_quads(snap_iri, entity, int(m.group("n")), po))
    return Timeline(entity, snapshots)


def state_at(store, entity: Iri, n: int, data_graph: GraphName = DEFAULT_GRAPH,
             lenient: bool = False) -> EntityState:
    """Entity state as of snapshot n, rebuilt by rewinding later updates."""
    timeline = load_timeline(store, entity)
    if not 1 <= n <= len(timeline):
        raise UnknownVersion(
            f"{entity.value} has versions 1..{len(timeline)}, not {n}"
        )
    current = store.fetch_entity_state(entity, data_graph)
    later = [s.update_query for s in timeline.snapshots[n:]]
    return delta.materialize(current, list(reversed(later)), lenient=lenient)
