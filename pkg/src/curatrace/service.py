"""Curation engine: the edit pipeline and the single writer per entity.

Every mutation runs inside the entity's critical section as
check -> validate -> diff -> apply+record, and lands on the store as one
update request carrying both the data changeset and the provenance quads,
so a failure in any earlier stage leaves the store untouched.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Iterable, Optional

from . import delta, display as display_mod, provenance, rdf
from .display import DisplayConfig
from .errors import Conflict, NotFound, UnknownVersion, ValidationFailed
from .provenance import Snapshot, Timeline
from .rdf import DEFAULT_GRAPH, EntityState, GraphName, Iri, Quad, Term
from .shapes import FormSchema, ValidationReport, validate_state
from .store import StoreBackend

RDF_TYPE = Iri(rdf.RDF_TYPE)

StatePairs = Iterable[tuple[Iri, Term]]
Clock = Callable[[], datetime]

_LOCAL_NAME = re.compile(r"[^A-Za-z0-9_-]+")


@dataclass(frozen=True)
class TimelineEntry:
    """API projection of one snapshot with its change counts."""

    number: int
    snapshot_iri: Iri
    generated_at: datetime
    responsible_agent: provenance.Agent
    invalidated_at: Optional[datetime] = None
    primary_source: Optional[Iri] = None
    added_count: int = 0
    deleted_count: int = 0


@dataclass(frozen=True)
class EditOutcome:
    snapshot: Snapshot
    warnings: tuple[str, ...] = ()


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class Engine:
    """Orchestrates stores, schema, display config, and provenance."""

    def __init__(self, store: StoreBackend, schema: Optional[FormSchema] = None,
                 display: Optional[DisplayConfig] = None, *,
                 data_graph: GraphName = DEFAULT_GRAPH,
                 base_iri: str = "http://example.org",
                 lenient: bool = False,
                 clock: Optional[Clock] = None):
        self.store = store
        self.schema = schema or FormSchema()
        self.display = display or DisplayConfig()
        self.data_graph = data_graph
        self.base_iri = base_iri.rstrip("/")
        self.lenient = lenient
        self._clock = clock or _utc_now
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._mint_guard = threading.Lock()
        self._mint_counters: dict[str, int] = {}

    # -- plumbing ----------------------------------------------------------

    def _lock_for(self, entity: Iri) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(entity.value, threading.Lock())

    def _graph_pattern(self, pattern: str) -> str:
        if self.data_graph is DEFAULT_GRAPH:
            return pattern
        return f"GRAPH {rdf.term_text(self.data_graph)} {{ {pattern} }}"

    def types_of(self, iri: Iri) -> set[Iri]:
        rows = self.store.select(
            f"SELECT ?t WHERE {{ {self._graph_pattern(f'{rdf.term_text(iri)} <{rdf.RDF_TYPE}> ?t')} }}"
        )
        return {row["t"] for row in rows if isinstance(row["t"], Iri)}

    def _persist(self, cs: delta.ChangeSet, snapshot: Snapshot,
                 predecessor: Optional[Snapshot]) -> None:
        """One atomic update: data changeset plus provenance statements."""
        pg = provenance.prov_graph_iri(snapshot.entity_iri)
        prov_quads = provenance.snapshot_to_quads(snapshot, pg)
        if predecessor is not None and predecessor.invalidated_at is None:
            prov_quads.add(provenance.invalidation_quad(
                predecessor, snapshot.generated_at, pg))
        parts = [delta.to_update_query(cs), delta.insert_data_text(prov_quads)]
        self.store.update("; ".join(p for p in parts if p))

    def _validate(self, candidate: EntityState) -> ValidationReport:
        types = {o for o in candidate.objects(RDF_TYPE) if isinstance(o, Iri)}
        return validate_state(candidate, types, self.schema, self.types_of)

    def timeline(self, entity: Iri) -> Timeline:
        return provenance.load_timeline(self.store, entity)

    # -- entity IRI minting -------------------------------------------------

    def _mint_iri(self, class_iri: Iri) -> Iri:
        local = class_iri.value.rsplit("#", 1)[-1].rsplit("/", 1)[-1]
        local = _LOCAL_NAME.sub("", local) or "entity"
        with self._mint_guard:
            n = self._mint_counters.get(local, 0)
            while True:
                n += 1
                candidate = Iri(f"{self.base_iri}/{local}/{n}")
                if len(self.timeline(candidate)) == 0 and \
                        self.store.fetch_entity_state(candidate, self.data_graph).is_empty():
                    self._mint_counters[local] = n
                    return candidate

    # -- mutations ----------------------------------------------------------

    def create_entity(self, class_iri: Optional[Iri], state_pairs: StatePairs,
                      agent: str, source: Optional[Iri] = None,
                      entity_iri: Optional[Iri] = None) -> EditOutcome:
        """Validate and persist a brand-new entity with snapshot #1."""
        pairs = list(state_pairs)
        if entity_iri is None:
            if class_iri is None:
                raise ValueError("either an entity IRI or a class is required")
            entity_iri = self._mint_iri(class_iri)
        if class_iri is not None and (RDF_TYPE, class_iri) not in pairs:
            pairs.append((RDF_TYPE, class_iri))
        candidate = EntityState.from_pairs(entity_iri, pairs)
        with self._lock_for(entity_iri):
            timeline = self.timeline(entity_iri)
            if len(timeline) > 0:
                raise Conflict(f"{entity_iri.value} is already versioned")
            report = self._validate(candidate)
            if not report.conforms:
                raise ValidationFailed(report)
            snapshot = provenance.record_creation(
                candidate, provenance.agent_term(agent), self._clock(),
                source=source, timeline=timeline)
            cs = delta.diff(EntityState(entity_iri), candidate, self.data_graph)
            self._persist(cs, snapshot, predecessor=None)
            return EditOutcome(snapshot)

    def submit_edit(self, entity: Iri, base_version: int, state_pairs: StatePairs,
                    agent: str, source: Optional[Iri] = None) -> EditOutcome:
        """Optimistically-locked edit: rejects stale base versions outright."""
        candidate = EntityState.from_pairs(entity, state_pairs)
        with self._lock_for(entity):
            timeline = self.timeline(entity)
            head = timeline.head()
            if head is None:
                raise NotFound(f"{entity.value} has no history")
            if head.number != base_version:
                raise Conflict(
                    f"stale base version {base_version}; head is {head.number}")
            report = self._validate(candidate)
            if not report.conforms:
                raise ValidationFailed(report)
            old = self.store.fetch_entity_state(entity, self.data_graph)
            snapshot = provenance.record_modification(
                old, candidate, provenance.agent_term(agent), self._clock(),
                timeline, source=source, data_graph=self.data_graph)
            self._persist(delta.diff(old, candidate, self.data_graph), snapshot, head)
            return EditOutcome(snapshot)

    def delete_entity(self, entity: Iri, agent: str) -> EditOutcome:
        with self._lock_for(entity):
            timeline = self.timeline(entity)
            head = timeline.head()
            if head is None:
                raise NotFound(f"{entity.value} has no history")
            current = self.store.fetch_entity_state(entity, self.data_graph)
            snapshot = provenance.record_deletion(
                current, provenance.agent_term(agent), self._clock(),
                timeline, data_graph=self.data_graph)
            self._persist(delta.diff(current, EntityState(entity), self.data_graph),
                          snapshot, head)
            return EditOutcome(snapshot)

    def restore_version(self, entity: Iri, target_number: int, agent: str) -> EditOutcome:
        """Re-establish the state of an earlier snapshot as a new head.

        The restored state is not re-validated against the current schema
        (history may predate it); violations are reported as warnings.
        """
        with self._lock_for(entity):
            timeline = self.timeline(entity)
            head = timeline.head()
            if head is None:
                raise NotFound(f"{entity.value} has no history")
            if not 1 <= target_number < head.number:
                raise UnknownVersion(
                    f"restore target must be in 1..{head.number - 1}, got {target_number}")
            current = self.store.fetch_entity_state(entity, self.data_graph)
            later = [s.update_query for s in timeline.snapshots[target_number:]]
            restored = delta.materialize(current, list(reversed(later)), lenient=self.lenient)
            snapshot = provenance.record_restore(
                current, timeline[target_number], restored,
                provenance.agent_term(agent), self._clock(), timeline,
                data_graph=self.data_graph)
            self._persist(delta.diff(current, restored, self.data_graph), snapshot, head)
            report = self._validate(restored)
            warnings = tuple(v.message for v in report.violations)
            return EditOutcome(snapshot, warnings)

    def import_states(self, quads: Iterable[Quad], agent: str,
                      source: Optional[Iri] = None) -> list[Snapshot]:
        """Version pre-existing data: one creation snapshot per subject.

        Graph components in the input are ignored; every subject's triples
        enter the configured data graph. Imported states are not validated
        against the schema (they predate it), but blank nodes are refused.
        """
        grouped = rdf.group_by_subject(quads)
        snapshots = []
        for subject in sorted(grouped, key=rdf.term_text):
            state = EntityState(subject, grouped[subject])
            with self._lock_for(subject):
                timeline = self.timeline(subject)
                snapshot = provenance.record_creation(
                    state, provenance.agent_term(agent), self._clock(),
                    source=source, timeline=timeline)
                cs = delta.diff(EntityState(subject), state, self.data_graph)
                self._persist(cs, snapshot, predecessor=None)
            snapshots.append(snapshot)
        return snapshots

    # -- reads ---------------------------------------------------------------

    def state_at(self, entity: Iri, number: int) -> EntityState:
        return provenance.state_at(self.store, entity, number,
                                   self.data_graph, lenient=self.lenient)

    def diff_versions(self, entity: Iri, m: int, n: int) -> str:
        """Canonical update query transforming state m into state n (m < n)."""
        if not m < n:
            raise UnknownVersion(f"diff requires m < n, got {m}, {n}")
        older = self.state_at(entity, m)
        newer = self.state_at(entity, n)
        return delta.to_update_query(delta.diff(older, newer, self.data_graph))

    def get_timeline(self, entity: Iri) -> list[TimelineEntry]:
        timeline = self.timeline(entity)
        if len(timeline) == 0:
            raise NotFound(f"{entity.value} has no history")
        entries = []
        for snapshot in timeline:
            if snapshot.update_query is None:
                added, deleted = len(self.state_at(entity, 1)), 0
            else:
                cs = delta.parse_update_query(snapshot.update_query)
                added, deleted = len(cs.additions), len(cs.deletions)
            entries.append(TimelineEntry(
                number=snapshot.number,
                snapshot_iri=snapshot.snapshot_iri,
                generated_at=snapshot.generated_at,
                invalidated_at=snapshot.invalidated_at,
                responsible_agent=snapshot.responsible_agent,
                primary_source=snapshot.primary_source,
                added_count=added,
                deleted_count=deleted,
            ))
        return entries

    def list_classes(self) -> list[dict]:
        rows = self.store.select(
            f"SELECT ?s ?t WHERE {{ {self._graph_pattern(f'?s <{rdf.RDF_TYPE}> ?t')} }}"
        )
        counts: dict[Iri, set] = {}
        for row in rows:
            if isinstance(row["t"], Iri):
                counts.setdefault(row["t"], set()).add(row["s"])
        listed = [
            {"iri": cls, "label": self.display.class_label(cls), "count": len(members)}
            for cls, members in counts.items()
        ]
        listed.sort(key=lambda item: item["iri"].value)
        return listed

    def list_entities(self, class_iri: Iri, offset: int = 0, limit: int = 50) -> list[Iri]:
        rows = self.store.select(
            f"SELECT ?s WHERE {{ {self._graph_pattern(f'?s <{rdf.RDF_TYPE}> {rdf.term_text(class_iri)}')} }}"
        )
        subjects = sorted({row["s"] for row in rows if isinstance(row["s"], Iri)},
                          key=lambda i: i.value)
        return subjects[offset:offset + limit]

    def entity_view(self, entity: Iri) -> dict:
        """State, head version, and resolved display values for one entity."""
        timeline = self.timeline(entity)
        head = timeline.head()
        state = self.store.fetch_entity_state(entity, self.data_graph)
        if head is None and state.is_empty():
            raise NotFound(f"{entity.value} is unknown")
        types = {o for o in state.objects(RDF_TYPE) if isinstance(o, Iri)}
        rendered: dict[str, dict] = {}
        for path in sorted({t.predicate for t in state.triples}, key=lambda p: p.value):
            prop = self.display.property_for(types, path)
            if prop is not None and not prop.displayed:
                continue
            entry: dict = {
                "label": prop.label if prop else None,
                "values": display_mod.display_value(
                    self.store, entity, path, prop, self.data_graph),
            }
            if prop is not None and prop.order_predicate is not None:
                entry["ordered"] = [
                    rdf.term_text(v) for v in display_mod.ordered_values(
                        self.store, entity, path, prop.order_predicate, self.data_graph)
                ]
            rendered[path.value] = entry
        return {
            "iri": entity,
            "head_version": head.number if head else None,
            "deleted": bool(head and head.is_deletion_marker()),
            "types": sorted(types, key=lambda t: t.value),
            "state": state,
            "display": rendered,
        }

    def schema_view(self) -> dict:
        """Form schema merged with display labels, for form-driving clients."""
        class_iris = sorted(set(self.schema.classes) | set(self.display.classes),
                            key=lambda c: c.value)
        out = []
        for cls in class_iris:
            display_entry = self.display.classes.get(cls)
            constraints = {c.path: c for c in self.schema.classes.get(cls, ())}
            paths = sorted(set(constraints) |
                           {p.path for p in (display_entry.properties if display_entry else ())},
                           key=lambda p: p.value)
            props = []
            for path in paths:
                constraint = constraints.get(path)
                prop = display_entry.property_for(path) if display_entry else None
                props.append({
                    "path": path,
                    "label": prop.label if prop else None,
                    "displayed": prop.displayed if prop else True,
                    "order_predicate": prop.order_predicate if prop else None,
                    "value_query": bool(prop.value_query) if prop else False,
                    "min_count": constraint.min_count if constraint else 0,
                    "max_count": constraint.max_count if constraint else None,
                    "datatype": constraint.datatype if constraint else None,
                    "value_class": constraint.value_class if constraint else None,
                    "allowed_values": list(constraint.allowed_values)
                    if constraint and constraint.allowed_values else None,
                })
            out.append({
                "iri": cls,
                "label": display_entry.label if display_entry else None,
                "properties": props,
            })
        return {"classes": out}
