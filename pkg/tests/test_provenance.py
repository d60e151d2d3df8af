"""Snapshot records, provenance quads, timeline loading, time travel."""

import random
from datetime import datetime, timedelta, timezone

import pytest

from curatrace.delta import parse_update_query
from curatrace.errors import (
    AlreadyVersioned,
    EmptyDiff,
    HistoryCorrupt,
    UnknownVersion,
)
from curatrace.provenance import (
    ATTRIBUTED_TO,
    DERIVED_FROM,
    GENERATED_AT,
    HAS_UPDATE_QUERY,
    INVALIDATED_AT,
    PRIMARY_SOURCE,
    PROV_ENTITY,
    RDF_TYPE,
    SPECIALIZATION_OF,
    Snapshot,
    Timeline,
    agent_term,
    format_timestamp,
    invalidation_quad,
    load_timeline,
    prov_graph_iri,
    record_creation,
    record_deletion,
    record_modification,
    record_restore,
    snapshot_iri,
    snapshot_to_quads,
    state_at,
)
from curatrace.rdf import EntityState, Iri, Literal, Triple
from curatrace.store import MemoryStore, apply_changeset
from curatrace import delta

from generators import mutate_state, rand_state

EX = "http://example.org/"
E = Iri(f"{EX}br/1")
TITLE = Iri("http://purl.org/dc/terms/title")
DATA_G = Iri(f"{EX}data")
AGENT = Iri("https://orcid.org/0000-0002-0000-0000")
T0 = datetime(2024, 1, 31, 10, 0, 0, tzinfo=timezone.utc)


def at(minutes: int) -> datetime:
    return T0 + timedelta(minutes=minutes)


def state(*titles: str) -> EntityState:
    return EntityState(E, {Triple(E, TITLE, Literal(v)) for v in titles})


class History:
    """Test double for the edit pipeline: keeps every full state (the oracle)."""

    def __init__(self, store=None):
        self.store = store or MemoryStore()
        self.pg = prov_graph_iri(E)
        self.states = []
        self.timeline = Timeline(E)

    def _persist(self, snapshot, cs=None):
        predecessor = self.timeline.head()
        quads = snapshot_to_quads(snapshot, self.pg)
        if predecessor is not None and predecessor.invalidated_at is None:
            quads.add(invalidation_quad(predecessor, snapshot.generated_at, self.pg))
        if cs is not None:
            apply_changeset(self.store, cs)
        self.store.load_quads(quads)
        self.timeline = load_timeline(self.store, E)
        return snapshot

    def create(self, s, t, source=None):
        snap = record_creation(s, AGENT, t, source=source, timeline=self.timeline)
        self.states.append(s)
        return self._persist(snap, delta.diff(EntityState(E), s, DATA_G))

    def modify(self, new, t):
        old = self.store.fetch_entity_state(E, DATA_G)
        snap = record_modification(old, new, AGENT, t, self.timeline, data_graph=DATA_G)
        self.states.append(new)
        return self._persist(snap, delta.diff(old, new, DATA_G))

    def delete(self, t):
        cur = self.store.fetch_entity_state(E, DATA_G)
        snap = record_deletion(cur, AGENT, t, self.timeline, data_graph=DATA_G)
        self.states.append(EntityState(E))
        return self._persist(snap, delta.diff(cur, EntityState(E), DATA_G))

    def restore(self, n, t):
        cur = self.store.fetch_entity_state(E, DATA_G)
        target = self.timeline[n]
        restored = state_at(self.store, E, n, DATA_G)
        snap = record_restore(cur, target, restored, AGENT, t, self.timeline, data_graph=DATA_G)
        self.states.append(restored)
        return self._persist(snap, delta.diff(cur, restored, DATA_G))


class TestSnapshotIri:
    def test_concatenation(self):
        assert snapshot_iri(E, 1) == Iri(f"{E.value}/prov/se/1")
        assert snapshot_iri(E, 12) == Iri(f"{E.value}/prov/se/12")

    def test_injective(self):
        seen = {snapshot_iri(Iri(f"{EX}e{i}"), n) for i in range(10) for n in range(1, 11)}
        assert len(seen) == 100


class TestRecordCreation:
    def test_fresh_entity(self):
        snap = record_creation(state("A"), AGENT, T0)
        assert snap.number == 1
        assert snap.snapshot_iri.value.endswith("/prov/se/1")
        assert snap.update_query is None
        assert snap.derived_from is None
        assert format_timestamp(snap.generated_at) == "2024-01-31T10:00:00Z"

    def test_primary_source_recorded(self):
        src = Iri(f"{EX}catalogue")
        assert record_creation(state("A"), AGENT, T0, source=src).primary_source == src

    def test_second_creation_refused(self):
        h = History()
        h.create(state("A"), T0)
        with pytest.raises(AlreadyVersioned):
            record_creation(state("B"), AGENT, at(1), timeline=h.timeline)


class TestRecordModification:
    def test_title_swap(self):
        h = History()
        h.create(state("A"), T0)
        snap = h.modify(state("B"), at(5))
        assert snap.number == 2
        assert "DELETE DATA" in snap.update_query and "INSERT DATA" in snap.update_query
        assert h.timeline[1].invalidated_at == at(5)

    def test_empty_diff_refused(self):
        h = History()
        h.create(state("A"), T0)
        with pytest.raises(EmptyDiff):
            record_modification(state("A"), state("A"), AGENT, at(1), h.timeline,
                                data_graph=DATA_G)

    def test_twenty_sequential_modifications(self):
        h = History()
        h.create(state("v0"), T0)
        for i in range(1, 21):
            h.modify(state(f"v{i}"), at(i))
        numbers = [s.number for s in h.timeline]
        assert numbers == list(range(1, 22))
        for prev, cur in zip(h.timeline.snapshots, h.timeline.snapshots[1:]):
            assert cur.derived_from == prev.snapshot_iri


class TestRecordRestore:
    def test_restore_after_three_edits(self):
        h = History()
        h.create(state("A"), T0)
        for i, v in enumerate(["B", "C", "D"], start=1):
            h.modify(state(v), at(i))
        snap = h.restore(1, at(10))
        assert snap.number == 5
        assert snap.primary_source == snapshot_iri(E, 1)
        assert h.store.fetch_entity_state(E, DATA_G) == state("A")

    def test_restore_to_current_state_refused(self):
        h = History()
        h.create(state("A"), T0)
        h.modify(state("B"), at(1))
        h.restore(1, at(2))
        with pytest.raises(EmptyDiff):
            h.restore(1, at(3))

    def test_materialize_at_new_head_equals_target(self):
        h = History()
        h.create(state("A", "X"), T0)
        h.modify(state("B"), at(1))
        h.modify(state("B", "Y"), at(2))
        h.restore(2, at(3))
        assert state_at(h.store, E, 4, DATA_G) == h.states[1]


class TestRecordDeletion:
    def test_delete_emits_pure_deletion_query(self):
        h = History()
        h.create(state("A", "B", "C"), T0)
        snap = h.delete(at(1))
        cs = parse_update_query(snap.update_query)
        assert len(cs.deletions) == 3
        assert not cs.additions

    def test_deletion_marker(self):
        h = History()
        h.create(state("A"), T0)
        snap = h.delete(at(1))
        assert snap.invalidated_at == snap.generated_at
        assert snap.is_deletion_marker()

    def test_materialize_before_deletion_resurrects(self):
        h = History()
        h.create(state("A", "B"), T0)
        h.modify(state("A"), at(1))
        h.delete(at(2))
        assert state_at(h.store, E, 2, DATA_G) == state("A")
        assert state_at(h.store, E, 1, DATA_G) == state("A", "B")


class TestSnapshotQuads:
    def test_creation_quad_count(self):
        bare = record_creation(state("A"), AGENT, T0)
        sourced = record_creation(state("A"), AGENT, T0, source=Iri(f"{EX}src"))
        pg = prov_graph_iri(E)
        assert len(snapshot_to_quads(bare, pg)) == 4
        assert len(snapshot_to_quads(sourced, pg)) == 5

    def test_modification_includes_update_query(self):
        h = History()
        h.create(state("A"), T0)
        snap = h.modify(state("B"), at(1))
        quads = snapshot_to_quads(snap, h.pg)
        queries = [q.object for q in quads if q.predicate == HAS_UPDATE_QUERY]
        assert len(queries) == 1
        assert queries[0] == Literal(snap.update_query)

    def test_only_the_published_vocabulary_is_used(self):
        h = History()
        h.create(state("A"), T0, source=Iri(f"{EX}src"))
        h.modify(state("B"), at(1))
        allowed = {RDF_TYPE, SPECIALIZATION_OF, GENERATED_AT, INVALIDATED_AT,
                   ATTRIBUTED_TO, PRIMARY_SOURCE, DERIVED_FROM, HAS_UPDATE_QUERY}
        for q in h.store.all_quads():
            if q.graph == h.pg:
                assert q.predicate in allowed

    def test_round_trip_field_for_field(self):
        h = History()
        h.create(state("A"), T0, source=Iri(f"{EX}src"))
        h.modify(state("B"), at(1))
        h.delete(at(2))
        reloaded = load_timeline(h.store, E)
        assert list(reloaded) == list(h.timeline)


class TestLoadTimeline:
    def test_unversioned_entity(self):
        assert len(load_timeline(MemoryStore(), E)) == 0

    def test_five_snapshot_lifecycle(self):
        h = History()
        h.create(state("A"), T0)
        for i, v in enumerate(["B", "C", "D"], start=1):
            h.modify(state(v), at(i))
        h.restore(1, at(4))
        assert [s.number for s in load_timeline(h.store, E)] == [1, 2, 3, 4, 5]

    def test_missing_snapshot_detected(self):
        h = History()
        h.create(state("A"), T0)
        h.modify(state("B"), at(1))
        h.modify(state("C"), at(2))
        se2 = snapshot_iri(E, 2)
        gutted = MemoryStore()
        gutted.load_quads(q for q in h.store.all_quads() if q.subject != se2)
        with pytest.raises(HistoryCorrupt):
            load_timeline(gutted, E)


class TestStateAt:
    def test_head_equals_fetch(self):
        h = History()
        h.create(state("A"), T0)
        h.modify(state("B"), at(1))
        assert state_at(h.store, E, 2, DATA_G) == h.store.fetch_entity_state(E, DATA_G)

    def test_rewind_to_creation_after_random_edits(self):
        rng = random.Random(1234)
        h = History()
        first = rand_state(rng, E, max_triples=6)
        h.create(first, T0)
        cur = first
        for i in range(1, 11):
            nxt = mutate_state(rng, cur)
            if nxt == cur:
                continue
            h.modify(nxt, at(i))
            cur = nxt
        assert state_at(h.store, E, 1, DATA_G) == first

    def test_every_version_matches_oracle(self):
        rng = random.Random(77)
        h = History()
        h.create(rand_state(rng, E, max_triples=5), T0)
        minute = 1
        while minute <= 8:
            nxt = mutate_state(rng, h.states[-1])
            if nxt == h.states[-1]:
                nxt = mutate_state(rng, nxt)
            if nxt == h.states[-1]:
                continue
            h.modify(nxt, at(minute))
            minute += 1
        for k, expected in enumerate(h.states, start=1):
            assert state_at(h.store, E, k, DATA_G) == expected

    def test_version_zero_unknown(self):
        h = History()
        h.create(state("A"), T0)
        with pytest.raises(UnknownVersion):
            state_at(h.store, E, 0, DATA_G)


class TestAgentTerm:
    def test_iri_agent(self):
        assert agent_term("https://orcid.org/0000") == Iri("https://orcid.org/0000")

    def test_plain_text_agent(self):
        assert agent_term("anonymous") == Literal("anonymous")
