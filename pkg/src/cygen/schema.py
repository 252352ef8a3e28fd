"""Graph schema extraction, subschema computation, and prompt rendering.

The schema text rendered by `render_schema` has three sections (node
properties, relationship properties, valid relationships) because every
prompt template interpolates a `{schema}` string of that shape.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

from .errors import EmptyDatabaseError, GraphConnectionError, UnknownLabelError
from .graphdb.session import GraphSession


class PropertyType(str, Enum):
    STRING = "STRING"
    INTEGER = "INTEGER"
    FLOAT = "FLOAT"
    BOOLEAN = "BOOLEAN"
    DATE = "DATE"
    LIST = "LIST"
    OTHER = "OTHER"


class RelTriple(NamedTuple):
    source: str
    name: str
    target: str


# driver-reported type names -> closed enumeration; everything else is OTHER
_TYPE_MAP = {
    "String": PropertyType.STRING,
    "Long": PropertyType.INTEGER,
    "Integer": PropertyType.INTEGER,
    "Double": PropertyType.FLOAT,
    "Float": PropertyType.FLOAT,
    "Boolean": PropertyType.BOOLEAN,
    "Date": PropertyType.DATE,
}


def _map_property_types(type_names: list[str] | None) -> PropertyType:
    if not type_names:
        return PropertyType.OTHER
    mapped = set()
    for name in type_names:
        if name.endswith("Array") or name in ("List", "ListAny"):
            mapped.add(PropertyType.LIST)
        else:
            mapped.add(_TYPE_MAP.get(name, PropertyType.OTHER))
    if len(mapped) == 1:
        return mapped.pop()
    return PropertyType.OTHER


@dataclass(frozen=True)
class GraphSchema:
    """Extracted database metadata; immutable and safe to share across workers."""

    node_labels: dict[str, dict[str, PropertyType]]
    relationship_types: dict[str, dict[str, PropertyType]]
    valid_relationships: tuple[RelTriple, ...]

    def __post_init__(self):
        object.__setattr__(self, "node_labels", {
            label: dict(sorted(props.items()))
            for label, props in sorted(self.node_labels.items())
        })
        object.__setattr__(self, "relationship_types", {
            name: dict(sorted(props.items()))
            for name, props in sorted(self.relationship_types.items())
        })
        triples = sorted(set(RelTriple(*t) for t in self.valid_relationships))
        object.__setattr__(self, "valid_relationships", tuple(triples))
        for triple in self.valid_relationships:
            if triple.source not in self.node_labels:
                raise ValueError(f"triple {triple} references unknown source label")
            if triple.target not in self.node_labels:
                raise ValueError(f"triple {triple} references unknown target label")

    def property_capabilities(self) -> set[PropertyType]:
        found: set[PropertyType] = set()
        for props in self.node_labels.values():
            found.update(props.values())
        for props in self.relationship_types.values():
            found.update(props.values())
        return found

    def labels_with_property_type(self, ptype: PropertyType) -> list[str]:
        return [
            label for label, props in self.node_labels.items()
            if any(t == ptype for t in props.values())
        ]


@dataclass(frozen=True)
class SubSchema(GraphSchema):
    origin_labels: tuple[str, ...] = ()
    hop_radius: int = 0


@dataclass(frozen=True)
class GraphExample:
    kind: str  # 'node' or 'relationship'
    name: str  # label or relationship type
    properties: dict[str, str]


# --- extraction -----------------------------------------------------------------


def extract_schema(session: GraphSession) -> GraphSchema:
    """Pull labels, property types, and valid edge triples from a live session."""
    labels = [row["label"] for row in session.run("CALL db.labels() YIELD label RETURN label").rows]
    if not labels:
        raise EmptyDatabaseError("database reports zero node labels")

    node_labels: dict[str, dict[str, PropertyType]] = {label: {} for label in labels}
    for row in session.run("CALL db.schema.nodeTypeProperties()").rows:
        prop = row.get("propertyName")
        if prop is None:
            continue
        ptype = _map_property_types(row.get("propertyTypes"))
        for label in row.get("nodeLabels") or []:
            existing = node_labels.setdefault(label, {}).get(prop)
            if existing is not None and existing != ptype:
                node_labels[label][prop] = PropertyType.OTHER
            else:
                node_labels[label][prop] = ptype

    rel_rows = session.run(
        "CALL db.relationshipTypes() YIELD relationshipType RETURN relationshipType"
    ).rows
    relationship_types: dict[str, dict[str, PropertyType]] = {
        row["relationshipType"]: {} for row in rel_rows
    }
    for row in session.run("CALL db.schema.relTypeProperties()").rows:
        prop = row.get("propertyName")
        if prop is None:
            continue
        rel_type = (row.get("relType") or "").replace(":", "").replace("`", "")
        if not rel_type:
            continue
        ptype = _map_property_types(row.get("propertyTypes"))
        existing = relationship_types.setdefault(rel_type, {}).get(prop)
        if existing is not None and existing != ptype:
            relationship_types[rel_type][prop] = PropertyType.OTHER
        else:
            relationship_types[rel_type][prop] = ptype

    triple_rows = session.run(
        "MATCH (a)-[r]->(b) "
        "UNWIND labels(a) AS source UNWIND labels(b) AS target "
        "RETURN DISTINCT source, type(r) AS name, target "
        "ORDER BY source, name, target"
    ).rows
    triples = [RelTriple(row["source"], row["name"], row["target"]) for row in triple_rows]

    return GraphSchema(node_labels, relationship_types, tuple(triples))


def sample_examples(
    session: GraphSession,
    schema: GraphSchema,
    per_label: int = 2,
    seed: int = 0,
    pool_cap: int = 100,
) -> list[GraphExample]:
    """Sample up to `per_label` example nodes/relationships per label and type."""
    if per_label < 1:
        raise ValueError("per_label must be >= 1")
    rng = random.Random(seed)
    examples: list[GraphExample] = []
    for label, declared in schema.node_labels.items():
        rows = session.run(
            f"MATCH (n:`{label}`) RETURN n ORDER BY id(n) LIMIT {pool_cap}"
        ).rows
        nodes = [row["n"] for row in rows]
        for node in _seeded_sample(rng, nodes, per_label):
            props = {
                key: render_value(value)
                for key, value in sorted(node.properties.items())
                if key in declared
            }
            examples.append(GraphExample("node", label, props))
    for rel_type, declared in schema.relationship_types.items():
        rows = session.run(
            f"MATCH ()-[r:`{rel_type}`]->() RETURN r ORDER BY id(r) LIMIT {pool_cap}"
        ).rows
        rels = [row["r"] for row in rows]
        for rel in _seeded_sample(rng, rels, per_label):
            props = {
                key: render_value(value)
                for key, value in sorted(rel.properties.items())
                if key in declared
            }
            examples.append(GraphExample("relationship", rel_type, props))
    return examples


def _seeded_sample(rng: random.Random, items: list, k: int) -> list:
    if len(items) <= k:
        return list(items)
    return rng.sample(items, k)


def render_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    if hasattr(value, "isoformat"):
        return value.isoformat()
    return str(value)


# --- subschema ------------------------------------------------------------------


def subgraph_schema(
    schema: GraphSchema,
    origin_labels: list[str],
    hops: int,
    include_relationship_props: bool = True,
) -> SubSchema:
    """Induced subschema of all labels within `hops` of any origin label.

    Reachability treats valid_relationships as undirected; a relationship is
    kept only when both endpoints are kept.
    """
    for label in origin_labels:
        if label not in schema.node_labels:
            raise UnknownLabelError(f"origin label {label!r} not in schema")
    if hops < 0:
        raise ValueError("hops must be >= 0")

    neighbors: dict[str, set[str]] = {}
    for source, _name, target in schema.valid_relationships:
        neighbors.setdefault(source, set()).add(target)
        neighbors.setdefault(target, set()).add(source)

    kept = set(origin_labels)
    frontier = set(origin_labels)
    for _ in range(hops):
        nxt = set()
        for label in frontier:
            nxt.update(neighbors.get(label, ()))
        nxt -= kept
        if not nxt:
            break
        kept.update(nxt)
        frontier = nxt

    kept_triples = tuple(
        t for t in schema.valid_relationships if t.source in kept and t.target in kept
    )
    kept_rel_names = {t.name for t in kept_triples}
    rel_props = {
        name: (dict(schema.relationship_types[name]) if include_relationship_props else {})
        for name in sorted(kept_rel_names)
    }
    return SubSchema(
        node_labels={label: dict(schema.node_labels[label]) for label in kept},
        relationship_types=rel_props,
        valid_relationships=kept_triples,
        origin_labels=tuple(sorted(origin_labels)),
        hop_radius=hops,
    )


# --- rendering and persistence ----------------------------------------------------


def render_schema(schema: GraphSchema) -> str:
    """Three-section prose layout interpolated into every `{schema}` prompt slot."""
    node_parts = []
    for label, props in schema.node_labels.items():
        inner = ", ".join(f"{name}: {ptype.value}" for name, ptype in props.items())
        node_parts.append(f"{label} {{{inner}}}")
    rel_parts = []
    for name, props in schema.relationship_types.items():
        inner = ", ".join(f"{prop}: {ptype.value}" for prop, ptype in props.items())
        rel_parts.append(f"{name} {{{inner}}}")
    triple_parts = [
        f"(:{t.source})-[:{t.name}]->(:{t.target})" for t in schema.valid_relationships
    ]
    return (
        "Node properties are the following:\n"
        + ",".join(node_parts)
        + "\n\nRelationship properties are the following:\n"
        + ", ".join(rel_parts)
        + "\n\nThe relationships are the following:\n"
        + ", ".join(triple_parts)
    )


def schema_to_json(schema: GraphSchema) -> str:
    payload = {
        "node_labels": {
            label: {p: t.value for p, t in props.items()}
            for label, props in schema.node_labels.items()
        },
        "relationship_types": {
            name: {p: t.value for p, t in props.items()}
            for name, props in schema.relationship_types.items()
        },
        "valid_relationships": [list(t) for t in schema.valid_relationships],
    }
    if isinstance(schema, SubSchema):
        payload["origin_labels"] = list(schema.origin_labels)
        payload["hop_radius"] = schema.hop_radius
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def schema_from_json(text: str) -> GraphSchema:
    payload = json.loads(text)
    node_labels = {
        label: {p: PropertyType(t) for p, t in props.items()}
        for label, props in payload["node_labels"].items()
    }
    relationship_types = {
        name: {p: PropertyType(t) for p, t in props.items()}
        for name, props in payload["relationship_types"].items()
    }
    triples = tuple(RelTriple(*t) for t in payload["valid_relationships"])
    if "origin_labels" in payload:
        return SubSchema(
            node_labels, relationship_types, triples,
            origin_labels=tuple(payload["origin_labels"]),
            hop_radius=payload["hop_radius"],
        )
    return GraphSchema(node_labels, relationship_types, triples)


def save_schema(schema: GraphSchema, path: str | Path) -> None:
    Path(path).write_text(schema_to_json(schema), encoding="utf-8")


def load_schema(path: str | Path) -> GraphSchema:
    try:
        return schema_from_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise GraphConnectionError(f"cannot read schema cache {path}: {exc}") from exc
