"""HTTP JSON API over the curation engine.

All bodies are UTF-8 JSON. Entity IRIs travel percent-encoded in paths.
Errors come back as {code, message, violations?}. The responsible agent is
taken from the X-Curator header, defaulting to "anonymous".
"""

from __future__ import annotations

from typing import Any, Optional
from urllib.parse import unquote

from fastapi import FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import rdf
from .errors import (
    BlankNodePresent,
    Conflict,
    CuratraceError,
    EmptyDiff,
    HistoryCorrupt,
    NotFound,
    ParseError,
    QueryError,
    TransportError,
    UnknownVersion,
    UnsupportedConstruct,
    ValidationFailed,
)
from .provenance import Snapshot, format_timestamp
from .rdf import Blank, EntityState, Iri, Literal, Term
from .service import Engine, TimelineEntry

_STATUS = [
    (NotFound, 404),
    (UnknownVersion, 404),
    (Conflict, 409),
    (ValidationFailed, 422),
    (EmptyDiff, 400),
    (BlankNodePresent, 400),
    (UnsupportedConstruct, 400),
    (ParseError, 400),
    (HistoryCorrupt, 500),
    (TransportError, 502),
    (QueryError, 502),
]


def term_to_json(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"type": "iri", "value": term.value}
    if isinstance(term, Blank):
        return {"type": "bnode", "value": term.label}
    payload: dict[str, Any] = {"type": "literal", "value": term.lexical}
    if term.language is not None:
        payload["language"] = term.language
    elif term.datatype != rdf.XSD_STRING:
        payload["datatype"] = term.datatype
    return payload


def term_from_json(node: Any) -> Term:
    if not isinstance(node, dict) or "value" not in node:
        raise ValueError(f"term must be an object with a 'value': {node!r}")
    kind = node.get("type", "literal")
    if kind == "iri":
        return Iri(node["value"])
    if kind == "bnode":
        return Blank(node["value"])
    if kind == "literal":
        if node.get("language"):
            return Literal(node["value"], language=node["language"])
        if node.get("datatype"):
            return Literal(node["value"], datatype=node["datatype"])
        return Literal(node["value"])
    raise ValueError(f"unknown term type {kind!r}")


def _state_pairs_from_json(raw: Any) -> list[tuple[Iri, Term]]:
    if not isinstance(raw, list):
        raise ValueError("'state' must be a list of {predicate, object} items")
    pairs = []
    for item in raw:
        if not isinstance(item, dict) or "predicate" not in item or "object" not in item:
            raise ValueError("each state item needs 'predicate' and 'object'")
        pairs.append((Iri(item["predicate"]), term_from_json(item["object"])))
    return pairs


def _state_to_json(state: EntityState) -> list[dict]:
    triples = sorted(state.triples,
                     key=lambda t: (t.predicate.value, rdf.term_text(t.object)))
    return [{"predicate": t.predicate.value, "object": term_to_json(t.object)}
            for t in triples]


def snapshot_to_json(snapshot: Snapshot, warnings: tuple[str, ...] = ()) -> dict:
    payload = {
        "number": snapshot.number,
        "snapshot_iri": snapshot.snapshot_iri.value,
        "entity": snapshot.entity_iri.value,
        "generated_at": format_timestamp(snapshot.generated_at),
        "agent": term_to_json(snapshot.responsible_agent),
        "invalidated_at": format_timestamp(snapshot.invalidated_at)
        if snapshot.invalidated_at else None,
        "primary_source": snapshot.primary_source.value if snapshot.primary_source else None,
        "derived_from": snapshot.derived_from.value if snapshot.derived_from else None,
        "update_query": snapshot.update_query,
    }
    if warnings:
        payload["warnings"] = list(warnings)
    return payload


def _timeline_entry_to_json(entry: TimelineEntry) -> dict:
    return {
        "number": entry.number,
        "snapshot_iri": entry.snapshot_iri.value,
        "generated_at": format_timestamp(entry.generated_at),
        "invalidated_at": format_timestamp(entry.invalidated_at)
        if entry.invalidated_at else None,
        "agent": term_to_json(entry.responsible_agent),
        "primary_source": entry.primary_source.value if entry.primary_source else None,
        "added_count": entry.added_count,
        "deleted_count": entry.deleted_count,
    }


def _iri_json(value: Optional[Iri]) -> Optional[str]:
    return value.value if value is not None else None


def _schema_to_json(view: dict) -> dict:
    classes = []
    for cls in view["classes"]:
        classes.append({
            "iri": cls["iri"].value,
            "label": cls["label"],
            "properties": [{
                "path": p["path"].value,
                "label": p["label"],
                "displayed": p["displayed"],
                "order_predicate": _iri_json(p["order_predicate"]),
                "value_query": p["value_query"],
                "min_count": p["min_count"],
                "max_count": p["max_count"],
                "datatype": _iri_json(p["datatype"]),
                "value_class": _iri_json(p["value_class"]),
                "allowed_values": [term_to_json(v) for v in p["allowed_values"]]
                if p["allowed_values"] else None,
            } for p in cls["properties"]],
        })
    return {"classes": classes}


def _error_response(exc: CuratraceError) -> JSONResponse:
    status = 500
    for klass, code in _STATUS:
        if isinstance(exc, klass):
            status = code
            break
    body: dict[str, Any] = {"code": status, "message": str(exc)}
    if isinstance(exc, ValidationFailed):
        body["violations"] = [
            {"focus": v.focus.value, "path": v.path.value,
             "kind": v.kind.value, "message": v.message}
            for v in exc.report.violations
        ]
    return JSONResponse(status_code=status, content=body)


def _entity_iri(raw: str) -> Iri:
    text = unquote(raw) if "%" in raw else raw
    try:
        return Iri(text)
    except ValueError as exc:
        raise NotFound(f"not an entity IRI: {text!r}") from exc


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="curatrace", docs_url=None, redoc_url=None)
    # the curator UI may be served from another origin; auth is not cookie-based
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(CuratraceError)
    async def _handle_curatrace_error(request: Request, exc: CuratraceError):
        return _error_response(exc)

    @app.exception_handler(ValueError)
    async def _handle_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"code": 400, "message": str(exc)})

    @app.get("/api/schema")
    def get_schema():
        return _schema_to_json(engine.schema_view())

    @app.get("/api/classes")
    def get_classes():
        return [{"iri": c["iri"].value, "label": c["label"], "count": c["count"]}
                for c in engine.list_classes()]

    @app.get("/api/entities")
    def get_entities(clazz: str = Query(alias="class"),
                     offset: int = Query(0, ge=0),
                     limit: int = Query(50, ge=1, le=1000)):
        subjects = engine.list_entities(Iri(clazz), offset=offset, limit=limit)
        return {"class": clazz, "offset": offset, "limit": limit,
                "entities": [s.value for s in subjects]}

    @app.post("/api/entity", status_code=201)
    def post_entity(body: dict, x_curator: Optional[str] = Header(None)):
        pairs = _state_pairs_from_json(body.get("state", []))
        class_iri = Iri(body["class"]) if body.get("class") else None
        entity_iri = Iri(body["iri"]) if body.get("iri") else None
        source = Iri(body["primary_source"]) if body.get("primary_source") else None
        outcome = engine.create_entity(class_iri, pairs, x_curator or "anonymous",
                                       source=source, entity_iri=entity_iri)
        return snapshot_to_json(outcome.snapshot, outcome.warnings)

    @app.get("/api/entity/{iri:path}/timeline")
    def get_timeline(iri: str):
        return [_timeline_entry_to_json(e)
                for e in engine.get_timeline(_entity_iri(iri))]

    @app.get("/api/entity/{iri:path}/version/{n}")
    def get_version(iri: str, n: int):
        entity = _entity_iri(iri)
        state = engine.state_at(entity, n)
        return {"iri": entity.value, "version": n, "state": _state_to_json(state)}

    @app.post("/api/entity/{iri:path}/restore/{n}")
    def post_restore(iri: str, n: int, x_curator: Optional[str] = Header(None)):
        outcome = engine.restore_version(_entity_iri(iri), n, x_curator or "anonymous")
        return snapshot_to_json(outcome.snapshot, outcome.warnings)

    @app.get("/api/entity/{iri:path}")
    def get_entity(iri: str):
        view = engine.entity_view(_entity_iri(iri))
        return {
            "iri": view["iri"].value,
            "head_version": view["head_version"],
            "deleted": view["deleted"],
            "types": [t.value for t in view["types"]],
            "state": _state_to_json(view["state"]),
            "display": view["display"],
        }

    @app.put("/api/entity/{iri:path}")
    def put_entity(iri: str, body: dict, x_curator: Optional[str] = Header(None)):
        if "base_version" not in body or not isinstance(body["base_version"], int) \
                or body["base_version"] < 1:
            raise ValueError("'base_version' (integer >= 1) is required")
        pairs = _state_pairs_from_json(body.get("state", []))
        source = Iri(body["primary_source"]) if body.get("primary_source") else None
        outcome = engine.submit_edit(_entity_iri(iri), body["base_version"], pairs,
                                     x_curator or "anonymous", source=source)
        return snapshot_to_json(outcome.snapshot, outcome.warnings)

    @app.delete("/api/entity/{iri:path}")
    def delete_entity(iri: str, x_curator: Optional[str] = Header(None)):
        outcome = engine.delete_entity(_entity_iri(iri), x_curator or "anonymous")
        return snapshot_to_json(outcome.snapshot, outcome.warnings)

    return app
