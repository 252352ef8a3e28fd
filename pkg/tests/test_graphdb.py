"""Embedded Cypher engine behavior."""

import pytest

from cygen.errors import (
    CypherRuntimeError,
    CypherSyntaxError,
    QueryTimeout,
    UnsupportedCypherError,
)
from cygen.graphdb import MemoryGraph, MemorySession


@pytest.fixture()
def tiny() -> MemorySession:
    g = MemoryGraph()
    a = g.add_node("Disease", name="Flu", severity=1)
    b = g.add_node("Disease", name="Cold", severity=2)
    c = g.add_node("Department", name="Internal")
    food = g.add_node("Food", name="Soup", tags=["warm", "light"])
    g.add_rel(a, "belongs_to", c, name="x")
    g.add_rel(b, "belongs_to", c, name="y")
    g.add_rel(a, "acompany_with", b)
    g.add_rel(a, "do_eat", food)
    return MemorySession(g)


def test_match_with_property_map(tiny):
    rows = tiny.run("MATCH (d:Disease {name: 'Flu'}) RETURN d.severity AS s").rows
    assert rows == [{"s": 1}]


def test_nonexistent_label_returns_empty_not_error(tiny):
    assert tiny.run("MATCH (n:Ghost) RETURN n.name").rows == []


def test_unknown_property_is_null(tiny):
    rows = tiny.run("MATCH (d:Disease {name: 'Flu'}) RETURN d.nope AS v").rows
    assert rows == [{"v": None}]


def test_syntax_error_raises(tiny):
    with pytest.raises(CypherSyntaxError):
        tiny.run("MATCH (n:Disease RETURN n")


def test_write_clause_rejected(tiny):
    with pytest.raises(UnsupportedCypherError):
        tiny.run("CREATE (n:Disease {name: 'New'}) RETURN n")


def test_unknown_function_raises(tiny):
    with pytest.raises(CypherRuntimeError):
        tiny.run("MATCH (n:Disease) RETURN nosuchfn(n)")


def test_query_must_end_in_return(tiny):
    with pytest.raises(CypherSyntaxError):
        tiny.run("MATCH (n:Disease)")


def test_direction_semantics(tiny):
    right = tiny.run("MATCH (d:Disease {name:'Flu'})-[:belongs_to]->(x) RETURN x.name").rows
    assert right == [{"x.name": "Internal"}]
    left = tiny.run("MATCH (x)<-[:belongs_to]-(d:Disease {name:'Cold'}) RETURN x.name").rows
    assert left == [{"x.name": "Internal"}]
    both = tiny.run("MATCH (c:Department)-[:belongs_to]-(d) RETURN count(d) AS n").rows
    assert both == [{"n": 2}]


def test_aggregation_grouping(tiny):
    rows = tiny.run(
        "MATCH (d:Disease)-[:belongs_to]->(c) RETURN c.name AS dept, count(d) AS n"
    ).rows
    assert rows == [{"dept": "Internal", "n": 2}]


def test_aggregate_over_zero_rows(tiny):
    rows = tiny.run("MATCH (n:Ghost) RETURN count(n) AS c, collect(n.name) AS names").rows
    assert rows == [{"c": 0, "names": []}]


def test_count_distinct(tiny):
    rows = tiny.run("MATCH (d:Disease) RETURN count(DISTINCT d.severity) AS n").rows
    assert rows == [{"n": 2}]


def test_order_skip_limit(tiny):
    rows = tiny.run(
        "MATCH (d:Disease) RETURN d.name AS n ORDER BY d.severity DESC SKIP 1 LIMIT 1"
    ).rows
    assert rows == [{"n": "Flu"}]


def test_null_sorts_last_ascending(tiny):
    rows = tiny.run(
        "UNWIND [3, null, 1] AS x RETURN x ORDER BY x"
    ).rows
    assert [r["x"] for r in rows] == [1, 3, None]


def test_where_null_filtered(tiny):
    rows = tiny.run("UNWIND [1, null, 2] AS x WITH x WHERE x > 0 RETURN x").rows
    assert [r["x"] for r in rows] == [1, 2]


def test_three_valued_logic(tiny):
    rows = tiny.run(
        "RETURN (null = 1) IS NULL AS a, (1 = 1.0) AS b, ('a' = 1) AS c, "
        "(null OR true) AS d, (null AND false) AS e"
    ).rows[0]
    assert rows == {"a": True, "b": True, "c": False, "d": True, "e": False}


def test_integer_division_and_power(tiny):
    row = tiny.run("RETURN 7 / 2 AS a, 7.0 / 2 AS b, 2 ^ 3 AS c, 7 % 3 AS d").rows[0]
    assert row == {"a": 3, "b": 3.5, "c": 8.0, "d": 1}


def test_string_predicates_and_functions(tiny):
    row = tiny.run(
        "RETURN 'Soup' STARTS WITH 'So' AS a, 'Soup' CONTAINS 'ou' AS b, "
        "toUpper('x') AS c, split('a,b', ',') AS d, substring('abcdef', 1, 3) AS e"
    ).rows[0]
    assert row["a"] is True and row["b"] is True
    assert row["c"] == "X" and row["d"] == ["a", "b"] and row["e"] == "bcd"


def test_list_operations(tiny):
    row = tiny.run(
        "MATCH (f:Food) RETURN size(f.tags) AS s, f.tags[0] AS first, f.tags[0..1] AS sl"
    ).rows[0]
    assert row == {"s": 2, "first": "warm", "sl": ["warm"]}


def test_unwind_list_property(tiny):
    rows = tiny.run("MATCH (f:Food) UNWIND f.tags AS t RETURN t ORDER BY t").rows
    assert [r["t"] for r in rows] == ["light", "warm"]


def test_unwind_null_and_scalar(tiny):
    assert tiny.run("UNWIND null AS x RETURN x").rows == []
    with pytest.raises(CypherRuntimeError):
        tiny.run("UNWIND 5 AS x RETURN x")


def test_dates(tiny):
    row = tiny.run(
        "RETURN date('2020-03-01') < date('2021-01-01') AS a, date('2020-03-01').year AS y"
    ).rows[0]
    assert row["a"] is True and row["y"] == 2020


def test_case_expression(tiny):
    rows = tiny.run(
        "MATCH (d:Disease) RETURN d.name AS n, "
        "CASE WHEN d.severity > 1 THEN 'high' ELSE 'low' END AS c ORDER BY n"
    ).rows
    assert rows == [{"n": "Cold", "c": "high"}, {"n": "Flu", "c": "low"}]


def test_exists_and_count_subqueries(tiny):
    rows = tiny.run(
        "MATCH (d:Disease) WHERE EXISTS { (d)-[:do_eat]->(:Food) } RETURN d.name"
    ).rows
    assert rows == [{"d.name": "Flu"}]
    rows = tiny.run(
        "MATCH (d:Disease) RETURN d.name AS n, COUNT { (d)-[]->() } AS deg ORDER BY n"
    ).rows
    assert rows == [{"n": "Cold", "deg": 1}, {"n": "Flu", "deg": 3}]


def test_union_and_union_all(tiny):
    rows = tiny.run(
        "MATCH (d:Disease {name:'Flu'}) RETURN d.name AS v "
        "UNION MATCH (d:Disease {name:'Flu'}) RETURN d.name AS v"
    ).rows
    assert rows == [{"v": "Flu"}]
    rows = tiny.run(
        "MATCH (d:Disease {name:'Flu'}) RETURN d.name AS v "
        "UNION ALL MATCH (d:Disease {name:'Flu'}) RETURN d.name AS v"
    ).rows
    assert len(rows) == 2


def test_union_column_mismatch(tiny):
    with pytest.raises(CypherRuntimeError):
        tiny.run("MATCH (d:Disease) RETURN d.name AS a UNION MATCH (d:Disease) RETURN d.name AS b")


def test_optional_match_binds_null(tiny):
    rows = tiny.run(
        "MATCH (d:Disease) OPTIONAL MATCH (d)-[:do_eat]->(f:Food) "
        "RETURN d.name AS n, f.name AS f ORDER BY n"
    ).rows
    assert rows == [{"n": "Cold", "f": None}, {"n": "Flu", "f": "Soup"}]


def test_var_length_and_path_functions(tiny):
    rows = tiny.run(
        "MATCH p = (a:Disease {name:'Flu'})-[*1..2]->(b) RETURN length(p) AS l, b.name AS n "
        "ORDER BY l, n"
    ).rows
    assert {"l": 1, "n": "Cold"} in rows
    assert {"l": 2, "n": "Internal"} in rows  # Flu -> Cold -> Internal


def test_shortest_path(tiny):
    rows = tiny.run(
        "MATCH p = shortestPath((a:Food {name:'Soup'})-[*..4]-(b:Department)) "
        "RETURN length(p) AS l"
    ).rows
    assert rows == [{"l": 2}]


def test_relationship_uniqueness_within_match(tiny):
    # a single belongs_to edge cannot be used twice within one pattern
    rows = tiny.run(
        "MATCH (a:Disease {name:'Flu'})-[r:belongs_to]->(c)<-[r2:belongs_to]-(b) "
        "RETURN b.name"
    ).rows
    assert rows == [{"b.name": "Cold"}]


def test_parameters(tiny):
    rows = tiny.run("MATCH (d:Disease) WHERE d.name = $who RETURN d.severity AS s",
                    {"who": "Cold"}).rows
    assert rows == [{"s": 2}]


def test_with_requires_alias_for_expressions(tiny):
    with pytest.raises(CypherSyntaxError):
        tiny.run("MATCH (d:Disease) WITH d.name RETURN 1 AS x")


def test_return_star(tiny):
    rows = tiny.run("MATCH (d:Disease {name:'Flu'}) RETURN *").rows
    assert list(rows[0].keys()) == ["d"]


def test_timeout(tiny):
    with pytest.raises(QueryTimeout):
        tiny.run(
            "UNWIND range(1, 2000) AS a UNWIND range(1, 2000) AS b "
            "RETURN count(a * b) AS n",
            timeout=0.02,
        )


def test_procedures(tiny):
    labels = tiny.run("CALL db.labels() YIELD label RETURN label").values("label")
    assert labels == ["Department", "Disease", "Food"]
    types = tiny.run("CALL db.relationshipTypes()").values("relationshipType")
    assert types == ["acompany_with", "belongs_to", "do_eat"]
    rows = tiny.run("CALL db.schema.nodeTypeProperties()").rows
    by_prop = {(r["nodeType"], r["propertyName"]): r["propertyTypes"] for r in rows}
    assert by_prop[(":`Disease`", "severity")] == ["Long"]
    assert by_prop[(":`Food`", "tags")] == ["StringArray"]
