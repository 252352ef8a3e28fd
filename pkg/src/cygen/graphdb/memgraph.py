"""In-memory property graph used by the embedded Cypher engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable


@dataclass(frozen=True)
class Node:
    id: int
    labels: tuple[str, ...]
    properties: dict[str, Any]

    def __repr__(self) -> str:
        labels = "".join(f":{l}" for l in self.labels)
        return f"({labels} {self.properties!r})"


@dataclass(frozen=True)
class Relationship:
    id: int
    type: str
    start_id: int
    end_id: int
    properties: dict[str, Any]

    def __repr__(self) -> str:
        return f"-[:{self.type} {self.properties!r}]-"


@dataclass(frozen=True)
class Path:
    """Alternating node/relationship walk; rels[i] connects nodes[i], nodes[i+1]."""

    nodes: tuple[Node, ...]
    rels: tuple[Relationship, ...]

    def __len__(self) -> int:
        return len(self.rels)


@dataclass
class MemoryGraph:
    """Append-only store; reads are safe to share across threads once built."""

    nodes: dict[int, Node] = field(default_factory=dict)
    rels: dict[int, Relationship] = field(default_factory=dict)
    _by_label: dict[str, list[int]] = field(default_factory=dict)
    _by_reltype: dict[str, list[int]] = field(default_factory=dict)
    _out: dict[int, list[int]] = field(default_factory=dict)
    _in: dict[int, list[int]] = field(default_factory=dict)
    _next_id: int = 0

    def add_node(self, labels: str | Iterable[str], **properties: Any) -> Node:
        if isinstance(labels, str):
            labels = (labels,)
        node = Node(self._next_id, tuple(labels), dict(properties))
        self._next_id += 1
        self.nodes[node.id] = node
        for label in node.labels:
            self._by_label.setdefault(label, []).append(node.id)
        self._out.setdefault(node.id, [])
        self._in.setdefault(node.id, [])
        return node

    def add_rel(self, start: Node, rel_type: str, end: Node, **properties: Any) -> Relationship:
        rel = Relationship(self._next_id, rel_type, start.id, end.id, dict(properties))
        self._next_id += 1
        self.rels[rel.id] = rel
        self._by_reltype.setdefault(rel_type, []).append(rel.id)
        self._out[start.id].append(rel.id)
        self._in[end.id].append(rel.id)
        return rel

    # --- lookups used by the evaluator, all in deterministic insertion order ---

    def all_nodes(self) -> list[Node]:
        return [self.nodes[i] for i in sorted(self.nodes)]

    def nodes_with_label(self, label: str) -> list[Node]:
        return [self.nodes[i] for i in self._by_label.get(label, [])]

    def labels(self) -> list[str]:
        return sorted(self._by_label)

    def rel_types(self) -> list[str]:
        return sorted(self._by_reltype)

    def rels_of_type(self, rel_type: str) -> list[Relationship]:
        return [self.rels[i] for i in self._by_reltype.get(rel_type, [])]

    def out_rels(self, node_id: int) -> list[Relationship]:
        return [self.rels[i] for i in self._out.get(node_id, [])]

    def in_rels(self, node_id: int) -> list[Relationship]:
        return [self.rels[i] for i in self._in.get(node_id, [])]
