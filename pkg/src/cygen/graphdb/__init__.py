"""Graph database access: embedded Cypher engine plus optional bolt backend."""

from .memgraph import MemoryGraph, Node, Path, Relationship
from .session import BoltSession, GraphSession, MemorySession, QueryResult, connect

__all__ = [
    "MemoryGraph", "Node", "Path", "Relationship",
    "GraphSession", "MemorySession", "BoltSession", "QueryResult", "connect",
]
