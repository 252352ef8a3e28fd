"""Schema extraction, subschema computation, rendering, and persistence."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cygen.errors import EmptyDatabaseError, UnknownLabelError
from cygen.graphdb import MemoryGraph, MemorySession
from cygen.schema import (
    PropertyType,
    RelTriple,
    extract_schema,
    render_schema,
    sample_examples,
    schema_from_json,
    schema_to_json,
    subgraph_schema,
)


def _mini_session() -> MemorySession:
    g = MemoryGraph()
    d1 = g.add_node("Disease", name="Flu")
    d2 = g.add_node("Disease", name="Cold")
    dept = g.add_node("Department", name="Internal")
    g.add_rel(d1, "belongs_to", dept)
    g.add_rel(d2, "belongs_to", dept)
    return MemorySession(g)


def test_extract_schema_from_seeded_fixture():
    schema = extract_schema(_mini_session())
    assert list(schema.valid_relationships) == [RelTriple("Disease", "belongs_to", "Department")]
    assert schema.node_labels["Disease"] == {"name": PropertyType.STRING}


def test_isolated_label_no_edges():
    g = MemoryGraph()
    g.add_node("Loner", name="only")
    schema = extract_schema(MemorySession(g))
    assert len(schema.node_labels) == 1
    assert schema.valid_relationships == ()


def test_medkg_contains_disease_belongs_to_department(medkg_schema):
    assert RelTriple("Disease", "belongs_to", "Department") in medkg_schema.valid_relationships
    rendered = render_schema(medkg_schema)
    assert "(:Disease)-[:belongs_to]->(:Department)" in rendered


def test_empty_database_error():
    with pytest.raises(EmptyDatabaseError):
        extract_schema(MemorySession(MemoryGraph()))


def test_extraction_determinism(medkg_session):
    a = extract_schema(medkg_session)
    b = extract_schema(medkg_session)
    assert a == b
    assert schema_to_json(a) == schema_to_json(b)


def test_exotic_property_types_map_to_other():
    g = MemoryGraph()
    g.add_node("Weird", blob={"nested": 1})
    schema = extract_schema(MemorySession(g))
    assert schema.node_labels["Weird"]["blob"] == PropertyType.OTHER


def test_mixed_property_types_map_to_other():
    g = MemoryGraph()
    g.add_node("Mixed", x=1)
    g.add_node("Mixed", x="one")
    schema = extract_schema(MemorySession(g))
    assert schema.node_labels["Mixed"]["x"] == PropertyType.OTHER


def test_render_has_three_sections(medkg_schema):
    rendered = render_schema(medkg_schema)
    assert rendered.startswith("Node properties are the following:\n")
    assert "\n\nRelationship properties are the following:\n" in rendered
    assert "\n\nThe relationships are the following:\n" in rendered


def test_serialization_round_trip(medkg_schema):
    assert schema_from_json(schema_to_json(medkg_schema)) == medkg_schema


def test_subschema_round_trip(medkg_schema):
    sub = subgraph_schema(medkg_schema, ["Producer"], 1)
    back = schema_from_json(schema_to_json(sub))
    assert back == sub
    assert back.origin_labels == ("Producer",)
    assert back.hop_radius == 1


# --- sampling -----------------------------------------------------------------


def test_sample_examples_cardinality(medkg_session, medkg_schema):
    examples = sample_examples(medkg_session, medkg_schema, per_label=2, seed=1)
    diseases = [e for e in examples if e.kind == "node" and e.name == "Disease"]
    assert len(diseases) == 2
    for example in examples:
        declared = (
            medkg_schema.node_labels[example.name]
            if example.kind == "node" else medkg_schema.relationship_types[example.name]
        )
        assert set(example.properties) <= set(declared)


def test_sample_examples_fewer_than_requested():
    session = _mini_session()
    schema = extract_schema(session)
    examples = sample_examples(session, schema, per_label=5, seed=0)
    departments = [e for e in examples if e.name == "Department"]
    assert len(departments) == 1  # only one node exists; no error


def test_sample_examples_deterministic(medkg_session, medkg_schema):
    a = sample_examples(medkg_session, medkg_schema, per_label=2, seed=42)
    b = sample_examples(medkg_session, medkg_schema, per_label=2, seed=42)
    assert a == b
    c = sample_examples(medkg_session, medkg_schema, per_label=2, seed=43)
    assert a != c  # different seed reshuffles at least one label's picks


# --- subschema -----------------------------------------------------------------


def test_subschema_hops_zero(medkg_schema):
    sub = subgraph_schema(medkg_schema, ["Disease", "Department"], 0)
    assert set(sub.node_labels) == {"Disease", "Department"}
    for triple in sub.valid_relationships:
        assert triple.source in sub.node_labels and triple.target in sub.node_labels
    assert RelTriple("Disease", "belongs_to", "Department") in sub.valid_relationships


def test_subschema_producer_one_hop(medkg_schema):
    sub = subgraph_schema(medkg_schema, ["Producer"], 1)
    assert set(sub.node_labels) == {"Producer", "Drug"}
    assert sub.valid_relationships == (RelTriple("Producer", "drugs_of", "Drug"),)


def test_subschema_saturation(medkg_schema):
    sub = subgraph_schema(medkg_schema, ["Disease"], 10)
    assert set(sub.node_labels) == set(medkg_schema.node_labels)
    assert sub.valid_relationships == medkg_schema.valid_relationships


def test_subschema_unknown_origin(medkg_schema):
    with pytest.raises(UnknownLabelError):
        subgraph_schema(medkg_schema, ["Nope"], 1)


def test_subschema_relationship_props_omitted(medkg_schema):
    sub = subgraph_schema(medkg_schema, ["Producer"], 1, include_relationship_props=False)
    assert sub.relationship_types == {"drugs_of": {}}


@settings(max_examples=30, deadline=None)
@given(hops=st.integers(min_value=0, max_value=4), origin=st.sampled_from([
    "Disease", "Department", "Drug", "Producer", "Food", "Sport",
]))
def test_subschema_monotone_in_hops(medkg_schema_module, hops, origin):
    smaller = subgraph_schema(medkg_schema_module, [origin], hops)
    larger = subgraph_schema(medkg_schema_module, [origin], hops + 1)
    assert set(smaller.node_labels) <= set(larger.node_labels)
    assert set(smaller.valid_relationships) <= set(larger.valid_relationships)
    assert set(smaller.relationship_types) <= set(larger.relationship_types)


@pytest.fixture(scope="module")
def medkg_schema_module():
    from cygen.graphdb import connect

    return extract_schema(connect("memory://medkg"))
