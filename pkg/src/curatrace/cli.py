"""Operator command line: serve, import, timeline, diff, restore, validate-shapes.

Machine-readable results go to stdout, diagnostics to stderr. Exit codes:
0 success, 1 user error (bad config, bad input, unknown entity/version),
2 internal error.
"""

from __future__ import annotations

import re
import sys
from pathlib import Path

import click

from . import rdf
from .config import EngineConfig, build_store, load_config_file
from .display import DisplayConfig, load_display_config
from .errors import CuratraceError
from .provenance import format_timestamp
from .rdf import Iri, contains_blank
from .service import Engine
from .shapes import FormSchema, extract_schema


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_engine(config_path: str) -> tuple[EngineConfig, Engine]:
    cfg = load_config_file(config_path)
    schema = FormSchema()
    if cfg.shapes_path:
        shapes_file = Path(cfg.shapes_path)
        if not shapes_file.exists():
            _fail(f"shapes file not found: {cfg.shapes_path}")
        schema = extract_schema(rdf.parse_nquads(shapes_file.read_text(encoding="utf-8")))
    display = DisplayConfig()
    if cfg.display_path:
        display_file = Path(cfg.display_path)
        if not display_file.exists():
            _fail(f"display config not found: {cfg.display_path}")
        display = load_display_config(display_file.read_text(encoding="utf-8"))
    engine = Engine(
        build_store(cfg.store),
        schema=schema,
        display=display,
        data_graph=cfg.store.data_graph,
        base_iri=cfg.base_iri,
        lenient=cfg.lenient,
    )
    return cfg, engine


def _guard(fn):
    """Map package errors to exit 1, anything unexpected to exit 2."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CuratraceError as exc:
            _fail(str(exc))
        except SystemExit:
            raise
        except Exception as exc:  # noqa: BLE001
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(2)

    wrapper.__name__ = fn.__name__
    return wrapper


config_option = click.option(
    "-c", "--config", "config_path", required=True,
    help="Engine configuration file (YAML).",
)


@click.group()
def main():
    """Semantic curation engine with snapshot provenance and time travel."""


@main.command()
@config_option
@_guard
def serve(config_path):
    """Run the HTTP JSON API server."""
    import uvicorn

    from .api import create_app

    cfg, engine = _load_engine(config_path)
    app = create_app(engine)
    click.echo(f"listening on {cfg.server_bind}:{cfg.server_port}", err=True)
    uvicorn.run(app, host=cfg.server_bind, port=cfg.server_port, log_level="warning")


@main.command(name="import")
@config_option
@click.argument("data_file")
@click.option("--agent", required=True, help="Responsible agent (IRI or plain text).")
@click.option("--source", default=None, help="Primary source IRI recorded on every snapshot.")
@_guard
def import_data(config_path, data_file, agent, source):
    """Version every subject of an N-Quads file from snapshot #1."""
    path = Path(data_file)
    if not path.exists():
        _fail(f"data file not found: {data_file}")
    text = path.read_text(encoding="utf-8")
    quads = rdf.parse_nquads(text)
    blank_line = _first_blank_line(text)
    if blank_line is not None:
        _fail(f"{data_file}:{blank_line}: blank nodes cannot be versioned; skolemize first")
    _, engine = _load_engine(config_path)
    snapshots = engine.import_states(quads, agent,
                                     source=Iri(source) if source else None)
    click.echo(f"{len(snapshots)} entities, {len(quads)} quads")


def _first_blank_line(text: str) -> int | None:
    for number, line in enumerate(re.split(r"\r\n|\r|\n", text), start=1):
        quad = rdf._Scanner(line, number).scan_statement()
        if quad is not None and contains_blank(quad):
            return number
    return None


def _agent_text(agent) -> str:
    return agent.value if isinstance(agent, Iri) else agent.lexical


@main.command()
@config_option
@click.argument("entity")
@_guard
def timeline(config_path, entity):
    """Print one line per snapshot: number, time, agent, +adds/-dels."""
    _, engine = _load_engine(config_path)
    for entry in engine.get_timeline(Iri(entity)):
        click.echo("\t".join([
            str(entry.number),
            format_timestamp(entry.generated_at),
            _agent_text(entry.responsible_agent),
            f"+{entry.added_count}/-{entry.deleted_count}",
        ]))


@main.command()
@config_option
@click.argument("entity")
@click.argument("m", type=int)
@click.argument("n", type=int)
@_guard
def diff(config_path, entity, m, n):
    """Print the canonical update query turning state M into state N (m < n)."""
    _, engine = _load_engine(config_path)
    click.echo(engine.diff_versions(Iri(entity), m, n))


@main.command()
@config_option
@click.argument("entity")
@click.argument("n", type=int)
@click.option("--agent", required=True)
@_guard
def restore(config_path, entity, n, agent):
    """Restore the entity to snapshot N via a new head snapshot."""
    _, engine = _load_engine(config_path)
    outcome = engine.restore_version(Iri(entity), n, agent)
    click.echo(f"{outcome.snapshot.number}\t{outcome.snapshot.snapshot_iri.value}")
    for warning in outcome.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command(name="validate-shapes")
@config_option
@_guard
def validate_shapes(config_path):
    """Load the configured shapes file and report its size."""
    cfg = load_config_file(config_path)
    if not cfg.shapes_path:
        _fail("config has no shapes.path")
    shapes_file = Path(cfg.shapes_path)
    if not shapes_file.exists():
        _fail(f"shapes file not found: {cfg.shapes_path}")
    schema = extract_schema(rdf.parse_nquads(shapes_file.read_text(encoding="utf-8")))
    constraints = sum(len(cs) for cs in schema.classes.values())
    click.echo(f"{len(schema.classes)} classes, {constraints} constraints")


if __name__ == "__main__":
    main()
