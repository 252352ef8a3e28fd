"""Template-filling generation pipeline.

Templates are declarative YAML files: typed slots plus question/cypher bodies
with `{slot}` placeholders (`{{`/`}}` escape literal braces). Loading filters
the registry down to templates the target schema can satisfy; binding samples
real slot values from the database with seeded backtracking, so an active
template always instantiates.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path
from string import Formatter
from typing import Any, Iterator, Optional

import yaml

from .errors import (
    CypherError,
    EmptyRegistry,
    TemplateParseError,
    UnsatisfiableSlot,
)
from .graphdb.session import GraphSession
from .pairs import Provenance, QuestionCypherPair
from .schema import GraphSchema, PropertyType, render_schema, subgraph_schema

_BUILTIN_DIR = Path(__file__).parent / "templates"

SLOT_KINDS = ("node-label", "relationship-type", "property-name", "property-value")
CAPABILITIES = ("DATE", "NUMERIC", "LIST", "BOOLEAN")

_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


SLOT_TYPE_NAMES = tuple(t.value for t in PropertyType) + ("NUMERIC",)


@dataclass(frozen=True)
class Slot:
    name: str
    kind: str
    of: Optional[str] = None  # property slots: owner slot; value slots: property slot
    type: Optional[str] = None  # property slots: required type (or NUMERIC = int|float)
    source: Optional[str] = None  # relationship slots: earlier label slot
    target: Optional[str] = None  # relationship slots: earlier label slot
    endpoint_of: Optional[tuple[str, str]] = None  # label slots: (rel slot, 'source'|'target')
    distinct_from: tuple[str, ...] = ()


@dataclass(frozen=True)
class SubschemaSpec:
    origin_slot: str
    hops: int = 2
    include_relationship_props: bool = True


@dataclass(frozen=True)
class Template:
    id: str
    slots: tuple[Slot, ...]
    question_text: str
    cypher_text: str
    required_capabilities: frozenset[str] = frozenset()
    subschema_spec: Optional[SubschemaSpec] = None
    syntax_tags: frozenset[str] = frozenset()

    def slot(self, name: str) -> Slot:
        for slot in self.slots:
            if slot.name == name:
                return slot
        raise KeyError(name)


@dataclass(frozen=True)
class SlotBinding:
    values: dict[str, Any]
    seed: int


@dataclass
class LoadResult:
    active: list[Template]
    excluded: list[tuple[str, str]]  # (template id or path, reason)


# --- parsing ---------------------------------------------------------------------


def parse_template(payload: dict, path: str = "<memory>") -> Template:
    def fail(msg: str) -> TemplateParseError:
        return TemplateParseError(msg, path=path)

    if not isinstance(payload, dict):
        raise fail("template file must contain a mapping")
    template_id = payload.get("id")
    if not template_id or not isinstance(template_id, str):
        raise fail("missing 'id'")
    question = payload.get("question")
    cypher = payload.get("cypher")
    if not isinstance(question, str) or not question.strip():
        raise fail("missing 'question' text")
    if not isinstance(cypher, str) or not cypher.strip():
        raise fail("missing 'cypher' text")

    slots: list[Slot] = []
    seen: list[str] = []
    for entry in payload.get("slots", []) or []:
        if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
            raise fail("each slot needs 'name' and 'kind'")
        name, kind = entry["name"], entry["kind"]
        if kind not in SLOT_KINDS:
            raise fail(f"slot {name!r}: unknown kind {kind!r}")
        if name in seen:
            raise fail(f"duplicate slot {name!r}")
        ptype = None
        if entry.get("type") is not None:
            ptype = str(entry["type"])
            if ptype not in SLOT_TYPE_NAMES:
                raise fail(f"slot {name!r}: unknown property type {ptype!r}")
        endpoint_of = None
        if entry.get("endpoint_of") is not None:
            raw = entry["endpoint_of"]
            if not isinstance(raw, list) or len(raw) != 2 or raw[1] not in ("source", "target"):
                raise fail(f"slot {name!r}: endpoint_of must be [rel_slot, source|target]")
            endpoint_of = (raw[0], raw[1])
        slot = Slot(
            name=name,
            kind=kind,
            of=entry.get("of"),
            type=ptype,
            source=entry.get("source"),
            target=entry.get("target"),
            endpoint_of=endpoint_of,
            distinct_from=tuple(entry.get("distinct_from", []) or []),
        )
        _check_slot_refs(slot, seen, fail)
        slots.append(slot)
        seen.append(name)

    for slot in slots:
        if slot.kind == "property-name" and slot.of is None:
            raise fail(f"slot {slot.name!r}: property slots need 'of'")
        if slot.kind == "property-value" and slot.of is None:
            raise fail(f"slot {slot.name!r}: value slots need 'of'")

    caps = frozenset(payload.get("capabilities", []) or [])
    for cap in caps:
        if cap not in CAPABILITIES:
            raise fail(f"unknown capability {cap!r}")

    sub = None
    if payload.get("subschema"):
        raw = payload["subschema"]
        origin = raw.get("origin_slot")
        if origin not in seen:
            raise fail(f"subschema origin_slot {origin!r} is not a declared slot")
        sub = SubschemaSpec(
            origin_slot=origin,
            hops=int(raw.get("hops", 2)),
            include_relationship_props=bool(raw.get("include_relationship_props", True)),
        )

    template = Template(
        id=template_id,
        slots=tuple(slots),
        question_text=question.strip(),
        cypher_text=cypher.strip(),
        required_capabilities=caps,
        subschema_spec=sub,
        syntax_tags=frozenset(payload.get("syntax_tags", []) or []),
    )
    _check_placeholders(template, fail)
    return template


def _check_slot_refs(slot: Slot, earlier: list[str], fail) -> None:
    for ref_name, ref in (
        ("of", slot.of), ("source", slot.source), ("target", slot.target),
    ):
        if ref is not None and ref not in earlier:
            raise fail(
                f"slot {slot.name!r}: {ref_name} references {ref!r}, which is not "
                "declared earlier (constraints are left-to-right)"
            )
    if slot.endpoint_of is not None and slot.endpoint_of[0] not in earlier:
        raise fail(
            f"slot {slot.name!r}: endpoint_of references {slot.endpoint_of[0]!r}, "
            "which is not declared earlier"
        )
    for ref in slot.distinct_from:
        if ref not in earlier:
            raise fail(f"slot {slot.name!r}: distinct_from references {ref!r}")


def _placeholders(text: str) -> set[str]:
    names = set()
    for _literal, f, _spec, _conv in Formatter().parse(text):
        if f:
            names.add(f)
    return names


def _check_placeholders(template: Template, fail) -> None:
    declared = {slot.name for slot in template.slots}
    allowed = declared | {"subschema"}
    try:
        used_q = _placeholders(template.question_text)
        used_c = _placeholders(template.cypher_text)
    except ValueError as exc:
        raise fail(f"malformed placeholder: {exc}")
    for name in used_q | used_c:
        if name not in allowed:
            raise fail(f"placeholder {{{name}}} names no declared slot")
    for name in declared:
        if name not in used_c:
            raise fail(f"slot {name!r} is never used in the cypher text")
    if "subschema" in used_q | used_c and template.subschema_spec is None:
        raise fail("{subschema} used but no subschema spec declared")


# --- loading ---------------------------------------------------------------------


def load_templates(
    registry_path: Optional[str | Path],
    schema: GraphSchema,
) -> LoadResult:
    """Parse every template file; keep only those satisfiable by the schema."""
    directory = Path(registry_path) if registry_path else _BUILTIN_DIR
    files = sorted(directory.glob("*.yaml")) + sorted(directory.glob("*.yml"))
    if not files:
        raise EmptyRegistry(f"no template files in {directory}")
    active: list[Template] = []
    excluded: list[tuple[str, str]] = []
    for file in files:
        try:
            payload = yaml.safe_load(file.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise TemplateParseError(
                f"invalid YAML: {exc}", path=str(file),
                line=None if mark is None else mark.line + 1,
            )
        template = parse_template(payload, path=str(file))
        reason = exclusion_reason(template, schema)
        if reason is None:
            active.append(template)
        else:
            excluded.append((template.id, reason))
    return LoadResult(active, excluded)


def schema_capabilities(schema: GraphSchema) -> set[str]:
    present = schema.property_capabilities()
    caps = set()
    if PropertyType.DATE in present:
        caps.add("DATE")
    if PropertyType.INTEGER in present or PropertyType.FLOAT in present:
        caps.add("NUMERIC")
    if PropertyType.LIST in present:
        caps.add("LIST")
    if PropertyType.BOOLEAN in present:
        caps.add("BOOLEAN")
    return caps


def exclusion_reason(template: Template, schema: GraphSchema) -> Optional[str]:
    missing = template.required_capabilities - schema_capabilities(schema)
    if missing:
        return f"schema lacks capabilities: {', '.join(sorted(missing))}"
    if _first_structural_assignment(template, schema) is None:
        return "no label/relationship/property assignment satisfies the slots"
    return None


# --- binding ---------------------------------------------------------------------


def _type_matches(required: Optional[str], actual: PropertyType) -> bool:
    if required is None:
        return actual is not PropertyType.OTHER
    if required == "NUMERIC":
        return actual in (PropertyType.INTEGER, PropertyType.FLOAT)
    return required == actual.value


def _owner_properties(schema: GraphSchema, owner_slot: Slot, owner_value: str) -> dict[str, PropertyType]:
    if owner_slot.kind == "node-label":
        return schema.node_labels.get(owner_value, {})
    return schema.relationship_types.get(owner_value, {})


def _structural_candidates(
    template: Template, schema: GraphSchema, slot: Slot, bound: dict[str, Any]
) -> list[str]:
    triples = schema.valid_relationships
    if slot.kind == "node-label":
        candidates = sorted(schema.node_labels)
        if slot.endpoint_of is not None:
            rel_slot_name, role = slot.endpoint_of
            rel_name = bound[rel_slot_name]
            rel_slot = template.slot(rel_slot_name)
            matching = set()
            for t in triples:
                if t.name != rel_name:
                    continue
                if rel_slot.source and bound.get(rel_slot.source) not in (None, t.source):
                    continue
                if rel_slot.target and bound.get(rel_slot.target) not in (None, t.target):
                    continue
                matching.add(t.source if role == "source" else t.target)
            candidates = sorted(set(candidates) & matching)
        return candidates
    if slot.kind == "relationship-type":
        names = set()
        for t in triples:
            if slot.source and bound.get(slot.source) != t.source:
                continue
            if slot.target and bound.get(slot.target) != t.target:
                continue
            names.add(t.name)
        return sorted(names)
    if slot.kind == "property-name":
        owner_slot = template.slot(slot.of)
        props = _owner_properties(schema, owner_slot, bound[slot.of])
        return sorted(p for p, t in props.items() if _type_matches(slot.type, t))
    raise AssertionError(f"not a structural slot: {slot.kind}")


def _first_structural_assignment(template: Template, schema: GraphSchema) -> Optional[dict]:
    structural = [s for s in template.slots if s.kind != "property-value"]

    def search(idx: int, bound: dict) -> Optional[dict]:
        if idx == len(structural):
            return bound
        slot = structural[idx]
        for value in _structural_candidates(template, schema, slot, bound):
            if any(bound.get(d) == value for d in slot.distinct_from):
                continue
            result = search(idx + 1, {**bound, slot.name: value})
            if result is not None:
                return result
        return None

    return search(0, {})


class TemplateSampler:
    """Seeded backtracking sampler; caches value queries across instantiations."""

    def __init__(self, schema: GraphSchema, session: GraphSession, value_cap: int = 200):
        self.schema = schema
        self.session = session
        self.value_cap = value_cap
        self._value_cache: dict[tuple[str, str, str], list[Any]] = {}

    def sample(self, template: Template, seed: int) -> SlotBinding:
        rng = random.Random(seed)
        slots = template.slots

        def candidates(slot: Slot, bound: dict) -> list[Any]:
            if slot.kind == "property-value":
                return self._value_candidates(template, slot, bound)
            return _structural_candidates(template, self.schema, slot, bound)

        def search(idx: int, bound: dict) -> Optional[dict]:
            if idx == len(slots):
                return bound
            slot = slots[idx]
            pool = list(candidates(slot, bound))
            rng.shuffle(pool)
            for value in pool:
                if any(_same_value(bound.get(d), value) for d in slot.distinct_from):
                    continue
                result = search(idx + 1, {**bound, slot.name: value})
                if result is not None:
                    return result
            return None

        values = search(0, {})
        if values is None:
            raise UnsatisfiableSlot(
                f"template {template.id}: no complete binding exists against this database"
            )
        return SlotBinding(values, seed)

    def _value_candidates(self, template: Template, slot: Slot, bound: dict) -> list[Any]:
        prop_slot = template.slot(slot.of)
        owner_slot = template.slot(prop_slot.of)
        owner_value = bound[prop_slot.of]
        prop_name = bound[slot.of]
        key = (owner_slot.kind, owner_value, prop_name)
        if key in self._value_cache:
            return self._value_cache[key]
        prop_type = _owner_properties(self.schema, owner_slot, owner_value).get(prop_name)
        is_list = prop_type == PropertyType.LIST
        if owner_slot.kind == "node-label":
            base = f"MATCH (x:`{owner_value}`) WHERE x.`{prop_name}` IS NOT NULL "
        else:
            base = f"MATCH ()-[x:`{owner_value}`]->() WHERE x.`{prop_name}` IS NOT NULL "
        if is_list:
            query = base + (
                f"UNWIND x.`{prop_name}` AS e RETURN DISTINCT e AS v "
                f"ORDER BY toString(v) LIMIT {self.value_cap}"
            )
        else:
            query = base + (
                f"RETURN DISTINCT x.`{prop_name}` AS v "
                f"ORDER BY toString(v) LIMIT {self.value_cap}"
            )
        try:
            values = [row["v"] for row in self.session.run(query).rows]
        except CypherError:
            values = []
        values = [v for v in values if v is not None]
        self._value_cache[key] = values
        return values


def _same_value(a: Any, b: Any) -> bool:
    return a is not None and a == b


def sample_binding(
    template: Template, schema: GraphSchema, session: GraphSession, seed: int
) -> SlotBinding:
    return TemplateSampler(schema, session).sample(template, seed)


# --- instantiation -----------------------------------------------------------------


def cypher_literal(value: Any) -> str:
    """Render a sampled value as a Cypher literal; strings get escaped quotes."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if hasattr(value, "isoformat"):
        return f"date('{value.isoformat()}')"
    if isinstance(value, list):
        return "[" + ", ".join(cypher_literal(v) for v in value) + "]"
    text = str(value).replace("\\", "\\\\").replace("'", "\\'")
    return f"'{text}'"


def cypher_identifier(name: str) -> str:
    if _IDENT_RE.match(name):
        return name
    return "`" + name.replace("`", "``") + "`"


def question_form(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "isoformat"):
        return value.isoformat()
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def instantiate(
    template: Template,
    binding: SlotBinding,
    schema: GraphSchema,
    database: str = "db",
) -> QuestionCypherPair:
    """Substitute a complete binding into the template texts."""
    for slot in template.slots:
        if slot.name not in binding.values:
            raise ValueError(f"binding is missing slot {slot.name!r}")

    question_values: dict[str, str] = {}
    cypher_values: dict[str, str] = {}
    for slot in template.slots:
        value = binding.values[slot.name]
        if slot.kind == "property-value":
            question_values[slot.name] = question_form(value)
            cypher_values[slot.name] = cypher_literal(value)
        else:
            question_values[slot.name] = str(value)
            cypher_values[slot.name] = cypher_identifier(str(value))

    sub_rendered: Optional[str] = None
    if template.subschema_spec is not None:
        spec = template.subschema_spec
        origin = str(binding.values[spec.origin_slot])
        sub = subgraph_schema(schema, [origin], spec.hops, spec.include_relationship_props)
        sub_rendered = render_schema(sub)
        question_values["subschema"] = sub_rendered
        cypher_values["subschema"] = sub_rendered

    question = template.question_text.format(**question_values)
    cypher = template.cypher_text.format(**cypher_values)
    _check_hygiene(template, question, cypher)

    snippet = f"Graph schema: {sub_rendered if sub_rendered is not None else render_schema(schema)}"
    return QuestionCypherPair(
        id=f"p2-{database}-{template.id}-{binding.seed}",
        question=question,
        cypher=cypher,
        schema_snippet=snippet,
        provenance=Provenance(
            pipeline="P2", database=database, template_id=template.id,
            seed=str(binding.seed),
        ),
    )


def _check_hygiene(template: Template, question: str, cypher: str) -> None:
    names = {slot.name for slot in template.slots} | {"subschema"}
    for text in (question, cypher):
        for match in _PLACEHOLDER_RE.finditer(text):
            if match.group(1) in names:
                raise ValueError(f"unsubstituted placeholder {match.group(0)} in output")


def registry_tag_coverage(templates: list[Template]) -> dict[str, int]:
    """Syntax-tag histogram; the registry's diversity report."""
    counts: dict[str, int] = {}
    for template in templates:
        for tag in template.syntax_tags:
            counts[tag] = counts.get(tag, 0) + 1
    return dict(sorted(counts.items()))


def generate_instances(
    templates: list[Template],
    schema: GraphSchema,
    session: GraphSession,
    database: str,
    per_template: int,
    base_seed: int,
    diagnostics: Optional[list[str]] = None,
) -> Iterator[QuestionCypherPair]:
    """per_template seeded instances per active template, skipping unsatisfiable draws."""
    sampler = TemplateSampler(schema, session)
    for template in templates:
        for offset in range(per_template):
            seed = base_seed + offset
            try:
                binding = sampler.sample(template, seed)
            except UnsatisfiableSlot as exc:
                if diagnostics is not None:
                    diagnostics.append(str(exc))
                break  # unsatisfiable is data-dependent, not seed-dependent
            yield instantiate(template, binding, schema, database)
