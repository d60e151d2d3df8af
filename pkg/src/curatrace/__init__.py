"""curatrace: semantic curation engine with snapshot provenance and time travel.

Core pieces: an RDF quad model with N-Quads parsing, invertible changesets
carried as restricted SPARQL updates, per-entity provenance timelines,
SHACL-derived editing constraints, YAML display configuration, and an HTTP
JSON API plus CLI on top.
"""

from .rdf import (
    DEFAULT_GRAPH,
    Blank,
    EntityState,
    Iri,
    Literal,
    Quad,
    Term,
    Triple,
    parse_nquads,
    parse_ntriples,
    serialize_nquads,
    term_text,
)
from .delta import ChangeSet, apply_to_state, diff, invert, materialize, parse_update_query, to_update_query

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_GRAPH",
    "Blank",
    "ChangeSet",
    "EntityState",
    "Iri",
    "Literal",
    "Quad",
    "Term",
    "Triple",
    "apply_to_state",
    "diff",
    "invert",
    "materialize",
    "parse_nquads",
    "parse_ntriples",
    "parse_update_query",
    "serialize_nquads",
    "term_text",
    "to_update_query",
]
