"""Template registry loading, slot binding, and instantiation."""

import datetime as dt

import pytest
import yaml

from cygen import pipeline_template as pt
from cygen.errors import EmptyRegistry, TemplateParseError, UnsatisfiableSlot
from cygen.graphdb import MemoryGraph, MemorySession
from cygen.schema import GraphSchema, PropertyType, RelTriple

S = PropertyType.STRING


def _template_payload(**overrides):
    payload = {
        "id": "t-demo",
        "syntax_tags": ["filter"],
        "capabilities": [],
        "slots": [
            {"name": "label_1", "kind": "node-label"},
            {"name": "prop_1", "kind": "property-name", "of": "label_1", "type": "STRING"},
            {"name": "val_1", "kind": "property-value", "of": "prop_1"},
        ],
        "question": "Find {label_1} with {prop_1} '{val_1}'.",
        "cypher": "MATCH (n:{label_1}) WHERE n.{prop_1} = {val_1} RETURN n",
    }
    payload.update(overrides)
    return payload


def test_parse_template_ok():
    template = pt.parse_template(_template_payload())
    assert template.id == "t-demo"
    assert [s.name for s in template.slots] == ["label_1", "prop_1", "val_1"]


def test_undeclared_placeholder_rejected():
    bad = _template_payload(cypher="MATCH (n:{label_1}) RETURN n.{prop_1}, {mystery}")
    with pytest.raises(TemplateParseError, match="mystery"):
        pt.parse_template(bad)


def test_unused_slot_rejected():
    bad = _template_payload(cypher="MATCH (n:{label_1}) RETURN n.{prop_1}")
    with pytest.raises(TemplateParseError, match="val_1"):
        pt.parse_template(bad)


def test_forward_reference_rejected():
    bad = _template_payload(slots=[
        {"name": "prop_1", "kind": "property-name", "of": "label_1", "type": "STRING"},
        {"name": "label_1", "kind": "node-label"},
        {"name": "val_1", "kind": "property-value", "of": "prop_1"},
    ])
    with pytest.raises(TemplateParseError, match="left-to-right"):
        pt.parse_template(bad)


def test_registry_loads_and_filters_date_templates(medkg_schema):
    load = pt.load_templates(None, medkg_schema)
    assert len(load.active) >= 80
    assert load.excluded == []

    # a schema without DATE-typed properties excludes every DATE template
    no_date = GraphSchema(
        {"Disease": {"name": S}, "Department": {"name": S}},
        {"belongs_to": {}},
        (RelTriple("Disease", "belongs_to", "Department"),),
    )
    load2 = pt.load_templates(None, no_date)
    date_templates = [t.id for t in load.active if "DATE" in t.required_capabilities]
    assert date_templates
    excluded_ids = {tid for tid, _ in load2.excluded}
    assert set(date_templates) <= excluded_ids
    for tid, reason in load2.excluded:
        if tid in date_templates:
            assert "DATE" in reason or "capabilit" in reason
    assert all("DATE" not in t.required_capabilities for t in load2.active)


def test_empty_registry(tmp_path, medkg_schema):
    with pytest.raises(EmptyRegistry):
        pt.load_templates(tmp_path, medkg_schema)


def test_malformed_yaml_reports_file(tmp_path, medkg_schema):
    (tmp_path / "bad.yaml").write_text("id: [unclosed", encoding="utf-8")
    with pytest.raises(TemplateParseError, match="bad.yaml"):
        pt.load_templates(tmp_path, medkg_schema)


def test_singleton_domain_forced():
    # only one label has a DATE property, so label_1 is forced to it
    schema = GraphSchema(
        {"Patient": {"name": S, "admission_date": PropertyType.DATE},
         "Clinic": {"name": S}},
        {},
        (),
    )
    payload = _template_payload(
        capabilities=["DATE"],
        slots=[
            {"name": "label_1", "kind": "node-label"},
            {"name": "prop_1", "kind": "property-name", "of": "label_1", "type": "STRING"},
            {"name": "prop_2", "kind": "property-name", "of": "label_1", "type": "DATE"},
        ],
        question="Dates of {label_1}: {prop_1} {prop_2}",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_1}, n.{prop_2}",
    )
    template = pt.parse_template(payload)
    g = MemoryGraph()
    g.add_node("Patient", name="Ann", admission_date=dt.date(2021, 5, 1))
    g.add_node("Clinic", name="North")
    session = MemorySession(g)
    for seed in range(5):
        binding = pt.sample_binding(template, schema, session, seed)
        assert binding.values["label_1"] == "Patient"
        assert binding.values["prop_2"] == "admission_date"


def test_binding_determinism(medkg_session, medkg_schema):
    load = pt.load_templates(None, medkg_schema)
    sampler = pt.TemplateSampler(medkg_schema, medkg_session)
    for template in load.active[:10]:
        assert sampler.sample(template, 11).values == sampler.sample(template, 11).values


def test_value_slot_samples_stored_value(medkg_session, medkg_schema):
    template = pt.parse_template(_template_payload())
    sampler = pt.TemplateSampler(medkg_schema, medkg_session)
    for seed in range(10):
        binding = sampler.sample(template, seed)
        label, prop, value = (binding.values[k] for k in ("label_1", "prop_1", "val_1"))
        rows = medkg_session.run(
            f"MATCH (n:`{label}`) WHERE n.`{prop}` = $v RETURN count(n) AS c", {"v": value}
        ).rows
        assert rows[0]["c"] >= 1


def test_unsatisfiable_value_slot():
    schema = GraphSchema({"Empty": {"note": S}}, {}, ())
    g = MemoryGraph()
    g.add_node("Empty")  # property declared in schema but absent on every node
    payload = _template_payload(slots=[
        {"name": "label_1", "kind": "node-label"},
        {"name": "prop_1", "kind": "property-name", "of": "label_1", "type": "STRING"},
        {"name": "val_1", "kind": "property-value", "of": "prop_1"},
    ])
    template = pt.parse_template(payload)
    with pytest.raises(UnsatisfiableSlot):
        pt.sample_binding(template, schema, MemorySession(g), seed=0)


def test_instantiate_matches_reference_shape():
    schema = GraphSchema(
        {"Patient": {"name": S, "admission_date": PropertyType.DATE}}, {}, (),
    )
    registry = pt.load_templates(None, schema)  # only need the parsed template
    template = next(
        t for t in registry.active + [t for t, _ in []]
        if t.id == "date-threshold-filter"
    )
    binding = pt.SlotBinding(
        {"label_1": "Patient", "prop_1": "name", "prop_2": "admission_date"}, seed=3,
    )
    pair = pt.instantiate(template, binding, schema, database="demo")
    assert pair.cypher == (
        "MATCH (n:Patient) WHERE date(n.admission_date) > date('2020-01-01') RETURN n.name"
    )
    assert pair.question == "Find all name for Patient that have admission_date after January 1, 2020!"
    assert pair.provenance.pipeline == "P2"
    assert pair.provenance.template_id == "date-threshold-filter"
    assert pair.provenance.seed == "3"


def test_instantiate_escapes_quotes(medkg_schema):
    template = pt.parse_template(_template_payload())
    binding = pt.SlotBinding(
        {"label_1": "Disease", "prop_1": "name", "val_1": "Crohn's disease"}, seed=0,
    )
    pair = pt.instantiate(template, binding, medkg_schema, "medkg")
    assert "WHERE n.name = 'Crohn\\'s disease'" in pair.cypher
    # the emitted Cypher must parse
    from cygen.graphdb.parser import parse

    parse(pair.cypher)


def test_instantiate_is_pure(medkg_session, medkg_schema):
    load = pt.load_templates(None, medkg_schema)
    template = load.active[0]
    binding = pt.sample_binding(template, medkg_schema, medkg_session, 5)
    a = pt.instantiate(template, binding, medkg_schema, "medkg")
    b = pt.instantiate(template, binding, medkg_schema, "medkg")
    assert a == b


def test_no_unsubstituted_placeholders(medkg_session, medkg_schema):
    import re

    load = pt.load_templates(None, medkg_schema)
    sampler = pt.TemplateSampler(medkg_schema, medkg_session)
    names = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")
    for template in load.active:
        binding = sampler.sample(template, 0)
        pair = pt.instantiate(template, binding, medkg_schema, "medkg")
        slot_names = {s.name for s in template.slots} | {"subschema"}
        for text in (pair.question, pair.cypher):
            leftover = {m.group(1) for m in names.finditer(text)} & slot_names
            assert not leftover, (template.id, text)


def test_subschema_snippet_attached(medkg_session, medkg_schema):
    load = pt.load_templates(None, medkg_schema)
    template = next(t for t in load.active if t.subschema_spec is not None)
    binding = pt.sample_binding(template, medkg_schema, medkg_session, 2)
    pair = pt.instantiate(template, binding, medkg_schema, "medkg")
    assert pair.schema_snippet.startswith("Graph schema: Node properties are the following:")


def test_tag_coverage_reported(medkg_schema):
    load = pt.load_templates(None, medkg_schema)
    coverage = pt.registry_tag_coverage(load.active)
    for tag in ("aggregation", "var-length", "exists-subquery", "union", "date", "list"):
        assert coverage.get(tag, 0) >= 1, tag


def test_registry_files_are_well_formed():
    registry = pt._BUILTIN_DIR
    files = sorted(registry.glob("*.yaml"))
    assert len(files) >= 80
    ids = set()
    for file in files:
        template = pt.parse_template(
            yaml.safe_load(file.read_text(encoding="utf-8")), path=str(file),
        )
        assert template.id not in ids
        ids.add(template.id)
