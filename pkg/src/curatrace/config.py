"""Engine configuration file (YAML): store, shapes, display, server."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError
from .rdf import DEFAULT_GRAPH, GraphName, Iri
from .store import MemoryStore, RemoteStore


@dataclass(frozen=True)
class StoreConfig:
    mode: str = "memory"
    query_endpoint: Optional[str] = None
    update_endpoint: Optional[str] = None
    data_graph: GraphName = DEFAULT_GRAPH
    timeout_seconds: float = 30.0


@dataclass(frozen=True)
class EngineConfig:
    store: StoreConfig = StoreConfig()
    shapes_path: Optional[str] = None
    display_path: Optional[str] = None
    base_iri: str = "http://example.org"
    server_bind: str = "127.0.0.1"
    server_port: int = 8200
    lenient: bool = False


def _mapping(node, path: str, allowed: set[str]) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise ConfigError("expected a mapping", path=path)
    for key in node:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", path=path)
    return node


def _parse_store(node) -> StoreConfig:
    node = _mapping(node, "store", {"mode", "query_endpoint", "update_endpoint",
                                    "data_graph", "timeout_seconds"})
    mode = node.get("mode", "memory")
    if mode not in ("memory", "remote"):
        raise ConfigError(f"store.mode must be 'memory' or 'remote', not {mode!r}",
                          path="store.mode")
    if mode == "remote":
        for key in ("query_endpoint", "update_endpoint"):
            if not node.get(key):
                raise ConfigError(f"remote mode requires store.{key}", path=f"store.{key}")
    graph_text = node.get("data_graph", "default")
    if graph_text == "default":
        data_graph: GraphName = DEFAULT_GRAPH
    else:
        try:
            data_graph = Iri(str(graph_text))
        except ValueError as exc:
            raise ConfigError(str(exc), path="store.data_graph") from exc
    timeout = node.get("timeout_seconds", 30.0)
    if not isinstance(timeout, (int, float)) or timeout <= 0:
        raise ConfigError("store.timeout_seconds must be a positive number",
                          path="store.timeout_seconds")
    return StoreConfig(mode=mode,
                       query_endpoint=node.get("query_endpoint"),
                       update_endpoint=node.get("update_endpoint"),
                       data_graph=data_graph,
                       timeout_seconds=float(timeout))


def load_config(text: str) -> EngineConfig:
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}", path="$") from exc
    document = _mapping(document, "$", {"store", "shapes", "display", "base_iri",
                                        "server", "lenient"})
    shapes = _mapping(document.get("shapes"), "shapes", {"path"})
    display = _mapping(document.get("display"), "display", {"path"})
    server = _mapping(document.get("server"), "server", {"bind", "port"})
    base_iri = document.get("base_iri", "http://example.org")
    try:
        Iri(str(base_iri))
    except ValueError as exc:
        raise ConfigError(str(exc), path="base_iri") from exc
    port = server.get("port", 8200)
    if not isinstance(port, int) or not 0 < port < 65536:
        raise ConfigError("server.port must be a port number", path="server.port")
    lenient = document.get("lenient", False)
    if not isinstance(lenient, bool):
        raise ConfigError("lenient must be a boolean", path="lenient")
    return EngineConfig(
        store=_parse_store(document.get("store")),
        shapes_path=shapes.get("path"),
        display_path=display.get("path"),
        base_iri=str(base_iri).rstrip("/"),
        server_bind=str(server.get("bind", "127.0.0.1")),
        server_port=port,
        lenient=lenient,
    )


def load_config_file(path: str | Path) -> EngineConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return load_config(text)


def build_store(cfg: StoreConfig):
    if cfg.mode == "memory":
        return MemoryStore()
    return RemoteStore(cfg.query_endpoint, cfg.update_endpoint, timeout=cfg.timeout_seconds)
