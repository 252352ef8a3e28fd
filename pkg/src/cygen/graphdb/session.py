"""Session abstraction over graph database backends.

`connect()` resolves a URI to a session:
  - memory://<fixture>   embedded engine over a named built-in fixture graph
  - graphjson://<path>   embedded engine over a JSON graph dump
  - bolt:// / neo4j://   a real server via the `neo4j` driver (optional extra)

All backends expose `run(query, parameters, timeout) -> QueryResult` with
read-only semantics.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from typing import Any, Optional, Protocol
from urllib.parse import urlparse

from ..errors import GraphConnectionError
from .evaluator import run_query
from .memgraph import MemoryGraph, Node, Relationship


@dataclass
class QueryResult:
    columns: list[str]
    rows: list[dict[str, Any]]

    def values(self, column: str | None = None) -> list[Any]:
        col = column or (self.columns[0] if self.columns else None)
        return [row[col] for row in self.rows]


class GraphSession(Protocol):
    def run(
        self,
        query: str,
        parameters: Optional[dict[str, Any]] = None,
        timeout: Optional[float] = None,
    ) -> QueryResult: ...

    def close(self) -> None: ...


class MemorySession:
    """Read-only session over an in-memory graph; safe to share once built."""

    def __init__(self, graph: MemoryGraph):
        self.graph = graph
        self._closed = False

    def run(
        self,
        query: str,
        parameters: Optional[dict[str, Any]] = None,
        timeout: Optional[float] = None,
    ) -> QueryResult:
        if self._closed:
            raise GraphConnectionError("session is closed")
        result = run_query(self.graph, query, parameters, timeout)
        return QueryResult(result.columns, result.rows)

    def close(self) -> None:
        self._closed = True

    def __enter__(self) -> "MemorySession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class BoltSession:
    """Thin wrapper over the official driver; needs `pip install cygen[bolt]`."""

    def __init__(self, uri: str, user: Optional[str], password: Optional[str],
                 database: Optional[str] = None):
        try:
            import neo4j  # type: ignore
        except ImportError as exc:
            raise GraphConnectionError(
                "bolt:// URIs need the neo4j driver; install the 'bolt' extra"
            ) from exc
        auth = (user, password) if user is not None else None
        try:
            self._driver = neo4j.GraphDatabase.driver(uri, auth=auth)
            self._driver.verify_connectivity()
        except Exception as exc:
            raise GraphConnectionError(f"cannot reach {uri}: {exc}") from exc
        self._database = database

    def run(
        self,
        query: str,
        parameters: Optional[dict[str, Any]] = None,
        timeout: Optional[float] = None,
    ) -> QueryResult:
        import neo4j  # type: ignore

        try:
            with self._driver.session(
                database=self._database, default_access_mode=neo4j.READ_ACCESS
            ) as session:
                def work(tx):
                    res = tx.run(query, parameters or {})
                    return res.keys(), [dict(record) for record in res]

                keys, rows = session.execute_read(work, timeout=timeout)
                return QueryResult(list(keys), rows)
        except neo4j.exceptions.ServiceUnavailable as exc:
            raise GraphConnectionError(str(exc)) from exc

    def close(self) -> None:
        self._driver.close()


def graph_from_json(payload: dict) -> MemoryGraph:
    """Build a graph from {"nodes": [...], "relationships": [...]} dump."""
    graph = MemoryGraph()
    by_key: dict[Any, Node] = {}
    for entry in payload.get("nodes", []):
        labels = entry.get("labels") or [entry["label"]]
        node = graph.add_node(tuple(labels), **_decode_props(entry.get("properties", {})))
        if "key" in entry:
            by_key[entry["key"]] = node
    for entry in payload.get("relationships", []):
        start = by_key[entry["start"]]
        end = by_key[entry["end"]]
        graph.add_rel(start, entry["type"], end, **_decode_props(entry.get("properties", {})))
    return graph


def _decode_props(props: dict) -> dict:
    out = {}
    for key, value in props.items():
        if isinstance(value, dict) and value.get("$type") == "date":
            out[key] = dt.date.fromisoformat(value["value"])
        else:
            out[key] = value
    return out


def connect(
    uri: str,
    user: Optional[str] = None,
    password: Optional[str] = None,
    database: Optional[str] = None,
) -> GraphSession:
    parsed = urlparse(uri)
    scheme = parsed.scheme.lower()
    if scheme == "memory":
        from ..fixtures import build_fixture

        return MemorySession(build_fixture(parsed.netloc or parsed.path.strip("/")))
    if scheme == "graphjson":
        path = (parsed.netloc + parsed.path) if parsed.netloc else parsed.path
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise GraphConnectionError(f"cannot read graph dump {path}: {exc}") from exc
        return MemorySession(graph_from_json(payload))
    if scheme in ("bolt", "neo4j", "bolt+s", "neo4j+s", "bolt+ssc", "neo4j+ssc"):
        return BoltSession(uri, user, password, database)
    raise GraphConnectionError(f"unsupported graph URI scheme {scheme!r}")


__all__ = [
    "QueryResult", "GraphSession", "MemorySession", "BoltSession",
    "connect", "graph_from_json", "MemoryGraph", "Node", "Relationship",
]
