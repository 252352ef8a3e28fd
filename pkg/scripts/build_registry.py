#!/usr/bin/env python3
"""Regenerate the built-in template registry (one YAML file per template).

The registry is data, not code; this script exists so the whole set can be
rebuilt or bulk-edited consistently. Run from the repo root:

    python scripts/build_registry.py
"""

from __future__ import annotations

import sys
from pathlib import Path

import yaml

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "cygen" / "templates"

# slot shorthands
L1 = {"name": "label_1", "kind": "node-label"}


def P(name, of="label_1", type="STRING"):
    slot = {"name": name, "kind": "property-name", "of": of}
    if type:
        slot["type"] = type
    return slot


def V(name, of, distinct_from=None):
    slot = {"name": name, "kind": "property-value", "of": of}
    if distinct_from:
        slot["distinct_from"] = distinct_from
    return slot


def R(name="rel_1", source=None, target=None):
    slot = {"name": name, "kind": "relationship-type"}
    if source:
        slot["source"] = source
    if target:
        slot["target"] = target
    return slot


def LBL(name, rel, role):
    return {"name": name, "kind": "node-label", "endpoint_of": [rel, role]}


SUB = {"origin_slot": "label_1", "hops": 2, "include_relationship_props": True}

TEMPLATES = [
    # --- basic lookup and filtering -------------------------------------------
    dict(
        id="match-all-limit",
        syntax_tags=["match", "order-limit"],
        slots=[L1],
        question="Show me up to 25 {label_1} nodes.",
        cypher="MATCH (n:{label_1}) RETURN n LIMIT 25",
    ),
    dict(
        id="project-property",
        syntax_tags=["match"],
        slots=[L1, P("prop_1")],
        question="List the {prop_1} of every {label_1}.",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_1}",
    ),
    dict(
        id="match-by-property-map",
        syntax_tags=["match", "property-map"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1")],
        question="Find the {label_1} whose {prop_1} is '{val_1}'.",
        cypher="MATCH (n:{label_1} {{{prop_1}: {val_1}}}) RETURN n",
    ),
    dict(
        id="where-equals",
        syntax_tags=["filter"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1")],
        question="Which {label_1} nodes have {prop_1} equal to '{val_1}'?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} = {val_1} RETURN n",
    ),
    dict(
        id="where-not-equals",
        syntax_tags=["filter"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1")],
        question="List {label_1} nodes whose {prop_1} is not '{val_1}'.",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} <> {val_1} RETURN n.{prop_1} LIMIT 10",
    ),
    dict(
        id="starts-with",
        syntax_tags=["filter", "string-predicate"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1")],
        question="Which {label_1} nodes have a {prop_1} beginning with '{val_1}'?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} STARTS WITH {val_1} RETURN n.{prop_1}",
    ),
    dict(
        id="contains-substring",
        syntax_tags=["filter", "string-predicate"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1")],
        question="Find {label_1} nodes whose {prop_1} contains '{val_1}'.",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} CONTAINS {val_1} RETURN n.{prop_1} LIMIT 10",
    ),
    dict(
        id="ends-with",
        syntax_tags=["filter", "string-predicate"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1")],
        question="Which {label_1} nodes have a {prop_1} ending in '{val_1}'?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} ENDS WITH {val_1} RETURN n.{prop_1}",
    ),
    dict(
        id="in-value-list",
        syntax_tags=["filter", "in-list"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), V("val_2", "prop_1", ["val_1"])],
        question="Fetch {label_1} nodes whose {prop_1} is '{val_1}' or '{val_2}'.",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} IN [{val_1}, {val_2}] RETURN n.{prop_1}",
    ),
    dict(
        id="not-null-count",
        syntax_tags=["null-check", "aggregation"],
        slots=[L1, P("prop_1", type=None)],
        question="How many {label_1} nodes have a known {prop_1}?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} IS NOT NULL RETURN count(n)",
    ),
    dict(
        id="null-count",
        syntax_tags=["null-check", "aggregation"],
        slots=[L1, P("prop_1", type=None)],
        question="How many {label_1} nodes are missing the {prop_1} property?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} IS NULL RETURN count(n)",
    ),
    dict(
        id="distinct-values",
        syntax_tags=["distinct", "order-limit"],
        slots=[L1, P("prop_1")],
        question="What distinct values of {prop_1} do {label_1} nodes take?",
        cypher="MATCH (n:{label_1}) RETURN DISTINCT n.{prop_1} ORDER BY n.{prop_1} LIMIT 25",
    ),
    dict(
        id="count-nodes",
        syntax_tags=["aggregation"],
        slots=[L1],
        question="How many {label_1} nodes are stored in the graph?",
        cypher="MATCH (n:{label_1}) RETURN count(n) AS total",
    ),
    dict(
        id="labels-of-node",
        syntax_tags=["introspection"],
        slots=[L1],
        question="Which labels are attached to a {label_1} node?",
        cypher="MATCH (n:{label_1}) RETURN DISTINCT labels(n) LIMIT 1",
    ),
    # --- relationships ----------------------------------------------------------
    dict(
        id="rel-targets",
        syntax_tags=["relationship"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="What is connected to the {label_1} with {prop_1} '{val_1}' through {rel_1}?",
        cypher="MATCH (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}]->(b) RETURN b",
    ),
    dict(
        id="rel-target-property",
        syntax_tags=["relationship"],
        slots=[
            L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1"),
            LBL("label_2", "rel_1", "target"), P("prop_2", of="label_2"),
        ],
        question="List the {prop_2} of {label_2} nodes linked from the {label_1} '{val_1}' via {rel_1}.",
        cypher=(
            "MATCH (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}]->(b:{label_2}) "
            "RETURN b.{prop_2}"
        ),
    ),
    dict(
        id="rel-sources",
        syntax_tags=["relationship", "reverse"],
        slots=[
            L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", target="label_1"),
            LBL("label_2", "rel_1", "source"), P("prop_2", of="label_2"),
        ],
        question="Which {label_2} nodes point at the {label_1} '{val_1}' through {rel_1}?",
        cypher=(
            "MATCH (a:{label_1} {{{prop_1}: {val_1}}})<-[:{rel_1}]-(b:{label_2}) "
            "RETURN b.{prop_2}"
        ),
    ),
    dict(
        id="top-connected",
        syntax_tags=["relationship", "aggregation", "order-limit"],
        slots=[L1, P("prop_1"), R("rel_1", source="label_1")],
        question="Which five {label_1} nodes have the most outgoing {rel_1} relations?",
        cypher=(
            "MATCH (a:{label_1})-[:{rel_1}]->(b) "
            "RETURN a.{prop_1}, count(b) ORDER BY count(b) DESC LIMIT 5"
        ),
    ),
    dict(
        id="optional-neighbor",
        syntax_tags=["optional-match"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="Show the {label_1} '{val_1}' together with its {rel_1} neighbors, if any.",
        cypher=(
            "MATCH (a:{label_1} {{{prop_1}: {val_1}}}) "
            "OPTIONAL MATCH (a)-[:{rel_1}]->(b) RETURN a.{prop_1}, b"
        ),
    ),
    dict(
        id="undirected-neighbors",
        syntax_tags=["relationship"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="List everything tied to the {label_1} '{val_1}' by a {rel_1} relation in either direction.",
        cypher="MATCH (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}]-(b) RETURN b LIMIT 10",
    ),
    dict(
        id="relationship-property",
        syntax_tags=["relationship"],
        slots=[L1, R("rel_1", source="label_1"), P("prop_2", of="rel_1")],
        question="What values does the {prop_2} property take on {rel_1} relations leaving {label_1} nodes?",
        cypher="MATCH (:{label_1})-[r:{rel_1}]->() RETURN r.{prop_2} LIMIT 10",
    ),
    dict(
        id="outgoing-rel-types",
        syntax_tags=["relationship", "introspection", "distinct"],
        slots=[L1],
        question="Which relationship types leave {label_1} nodes?",
        cypher="MATCH (a:{label_1})-[r]->() RETURN DISTINCT type(r)",
    ),
    dict(
        id="two-hop-chain",
        syntax_tags=["relationship", "multi-hop"],
        slots=[
            L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1"),
            LBL("label_2", "rel_1", "target"), R("rel_2", source="label_2"),
        ],
        question="Starting from the {label_1} '{val_1}', follow {rel_1} then {rel_2}; what do you reach?",
        cypher=(
            "MATCH (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}]->(b:{label_2})"
            "-[:{rel_2}]->(c) RETURN c LIMIT 10"
        ),
    ),
    dict(
        id="shared-target",
        syntax_tags=["relationship", "multi-hop", "distinct"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="Which other {label_1} nodes share a {rel_1} target with '{val_1}'?",
        cypher=(
            "MATCH (a:{label_1})-[:{rel_1}]->(x)<-[:{rel_1}]-(b:{label_1}) "
            "WHERE a.{prop_1} = {val_1} AND a <> b RETURN DISTINCT b.{prop_1} LIMIT 10"
        ),
    ),
    dict(
        id="count-relations",
        syntax_tags=["relationship", "aggregation"],
        slots=[L1, R("rel_1", source="label_1")],
        question="How many {rel_1} relations leave {label_1} nodes in total?",
        cypher="MATCH (a:{label_1})-[r:{rel_1}]->() RETURN count(r)",
    ),
    dict(
        id="collect-neighbors",
        syntax_tags=["relationship", "aggregation"],
        slots=[
            L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1"),
            LBL("label_2", "rel_1", "target"), P("prop_2", of="label_2"),
        ],
        question="Collect the {prop_2} of all {label_2} nodes the {label_1} '{val_1}' reaches via {rel_1}.",
        cypher=(
            "MATCH (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}]->(b:{label_2}) "
            "RETURN collect(b.{prop_2})"
        ),
    ),
    dict(
        id="var-length-reach",
        syntax_tags=["relationship", "var-length"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="What can be reached from the {label_1} '{val_1}' in one or two {rel_1} steps?",
        cypher=(
            "MATCH (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}*1..2]->(b) "
            "RETURN DISTINCT b LIMIT 10"
        ),
    ),
    dict(
        id="path-lengths",
        syntax_tags=["var-length", "path"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="How long are the {rel_1} paths (up to three hops) leaving the {label_1} '{val_1}'?",
        cypher=(
            "MATCH p = (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}*1..3]->(b) "
            "RETURN length(p), b LIMIT 5"
        ),
    ),
    dict(
        id="shortest-path-between",
        syntax_tags=["shortest-path", "path"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), V("val_2", "prop_1", ["val_1"])],
        question="How many hops separate the {label_1} '{val_1}' from '{val_2}'?",
        cypher=(
            "MATCH p = shortestPath((a:{label_1} {{{prop_1}: {val_1}}})"
            "-[*..4]-(b:{label_1} {{{prop_1}: {val_2}}})) RETURN length(p)"
        ),
    ),
    dict(
        id="path-nodes",
        syntax_tags=["var-length", "path"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="Show the nodes along short {rel_1} paths from the {label_1} '{val_1}'.",
        cypher=(
            "MATCH p = (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}*1..2]-(b) "
            "RETURN nodes(p) LIMIT 3"
        ),
    ),
    dict(
        id="single-hop-path",
        syntax_tags=["path"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1"), R("rel_1", source="label_1")],
        question="Inspect the direct {rel_1} links of the {label_1} '{val_1}' as paths.",
        cypher=(
            "MATCH p = (a:{label_1} {{{prop_1}: {val_1}}})-[:{rel_1}]->(b) "
            "RETURN relationships(p), length(p) LIMIT 3"
        ),
    ),
    # --- aggregation and sorting -------------------------------------------------
    dict(
        id="group-by-target",
        syntax_tags=["aggregation", "order-limit"],
        slots=[
            L1, R("rel_1", source="label_1"), LBL("label_2", "rel_1", "target"),
            P("prop_2", of="label_2"),
        ],
        question="Which {label_2} values attract the most {rel_1} relations from {label_1} nodes?",
        cypher=(
            "MATCH (a:{label_1})-[:{rel_1}]->(b:{label_2}) "
            "RETURN b.{prop_2} AS v, count(a) AS n ORDER BY n DESC LIMIT 5"
        ),
    ),
    dict(
        id="avg-numeric",
        syntax_tags=["aggregation", "numeric-function"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC")],
        question="What is the average {prop_1} across {label_1} nodes?",
        cypher="MATCH (n:{label_1}) RETURN avg(n.{prop_1})",
    ),
    dict(
        id="min-max-numeric",
        syntax_tags=["aggregation", "numeric-function"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC")],
        question="What are the smallest and largest {prop_1} among {label_1} nodes?",
        cypher="MATCH (n:{label_1}) RETURN min(n.{prop_1}), max(n.{prop_1})",
    ),
    dict(
        id="sum-numeric",
        syntax_tags=["aggregation", "numeric-function"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC")],
        question="What do the {prop_1} values of all {label_1} nodes add up to?",
        cypher="MATCH (n:{label_1}) RETURN sum(n.{prop_1})",
    ),
    dict(
        id="order-by-numeric",
        syntax_tags=["order-limit"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC"), P("prop_2")],
        question="List the top five {label_1} nodes by {prop_1}.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_2}, n.{prop_1} "
            "ORDER BY n.{prop_1} DESC LIMIT 5"
        ),
    ),
    dict(
        id="greater-than",
        syntax_tags=["filter", "comparison"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC"), V("val_1", "prop_1")],
        question="How many {label_1} nodes have {prop_1} above {val_1}?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} > {val_1} RETURN count(n)",
    ),
    dict(
        id="less-or-equal",
        syntax_tags=["filter", "comparison"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC"), P("prop_2"), V("val_1", "prop_1")],
        question="Show the {prop_2} of {label_1} nodes whose {prop_1} is at most {val_1}.",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} <= {val_1} RETURN n.{prop_2} LIMIT 10",
    ),
    dict(
        id="numeric-range",
        syntax_tags=["filter", "comparison", "boolean-logic"],
        capabilities=["NUMERIC"],
        slots=[
            L1, P("prop_1", type="NUMERIC"), P("prop_2"),
            V("val_1", "prop_1"), V("val_2", "prop_1", ["val_1"]),
        ],
        question="Which {label_1} nodes have {prop_1} between {val_1} and {val_2}?",
        cypher=(
            "MATCH (n:{label_1}) WHERE n.{prop_1} >= {val_1} AND n.{prop_1} <= {val_2} "
            "RETURN n.{prop_2} LIMIT 10"
        ),
    ),
    dict(
        id="count-distinct-values",
        syntax_tags=["aggregation", "distinct"],
        slots=[L1, P("prop_1")],
        question="How many distinct {prop_1} values exist among {label_1} nodes?",
        cypher="MATCH (n:{label_1}) RETURN count(DISTINCT n.{prop_1})",
    ),
    dict(
        id="with-threshold",
        syntax_tags=["with-chain", "aggregation", "order-limit"],
        slots=[L1, P("prop_1"), R("rel_1", source="label_1")],
        question="Which {label_1} nodes have at least two {rel_1} relations?",
        cypher=(
            "MATCH (a:{label_1})-[:{rel_1}]->(b) WITH a, count(b) AS n "
            "WHERE n >= 2 RETURN a.{prop_1}, n ORDER BY n DESC LIMIT 5"
        ),
    ),
    dict(
        id="avg-of-neighbors",
        syntax_tags=["relationship", "aggregation", "numeric-function"],
        capabilities=["NUMERIC"],
        slots=[
            L1, R("rel_1", source="label_1"), LBL("label_2", "rel_1", "target"),
            P("prop_2", of="label_2", type="NUMERIC"),
        ],
        question="What is the average {prop_2} of {label_2} nodes reachable from {label_1} nodes via {rel_1}?",
        cypher="MATCH (a:{label_1})-[:{rel_1}]->(b:{label_2}) RETURN avg(b.{prop_2})",
    ),
    dict(
        id="rounded-average",
        syntax_tags=["aggregation", "numeric-function"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC")],
        question="Roughly, what is the mean {prop_1} of {label_1} nodes (rounded)?",
        cypher="MATCH (n:{label_1}) RETURN round(avg(n.{prop_1}))",
    ),
    # --- string and scalar functions ----------------------------------------------
    dict(
        id="uppercase-values",
        syntax_tags=["string-function"],
        slots=[L1, P("prop_1")],
        question="Print the {prop_1} of {label_1} nodes in upper case.",
        cypher="MATCH (n:{label_1}) RETURN toUpper(n.{prop_1}) LIMIT 10",
    ),
    dict(
        id="lowercase-distinct",
        syntax_tags=["string-function", "distinct"],
        slots=[L1, P("prop_1")],
        question="List distinct lower-cased {prop_1} values of {label_1} nodes.",
        cypher=(
            "MATCH (n:{label_1}) RETURN DISTINCT toLower(n.{prop_1}) "
            "ORDER BY toLower(n.{prop_1}) LIMIT 10"
        ),
    ),
    dict(
        id="longest-strings",
        syntax_tags=["string-function", "order-limit"],
        slots=[L1, P("prop_1")],
        question="Which {label_1} nodes have the longest {prop_1}?",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_1}, size(n.{prop_1}) "
            "ORDER BY size(n.{prop_1}) DESC LIMIT 5"
        ),
    ),
    dict(
        id="string-prefix",
        syntax_tags=["string-function"],
        slots=[L1, P("prop_1")],
        question="Show the first three characters of each {label_1} {prop_1}.",
        cypher="MATCH (n:{label_1}) RETURN substring(n.{prop_1}, 0, 3) LIMIT 10",
    ),
    dict(
        id="split-words",
        syntax_tags=["string-function"],
        slots=[L1, P("prop_1")],
        question="Split the {prop_1} of {label_1} nodes into words.",
        cypher="MATCH (n:{label_1}) RETURN split(n.{prop_1}, ' ') LIMIT 5",
    ),
    dict(
        id="coalesce-default",
        syntax_tags=["coalesce", "null-check"],
        slots=[L1, P("prop_1", type=None)],
        question="Show each {label_1}'s {prop_1}, defaulting to 'unknown' when missing.",
        cypher="MATCH (n:{label_1}) RETURN coalesce(n.{prop_1}, 'unknown') LIMIT 10",
    ),
    dict(
        id="case-threshold",
        syntax_tags=["case", "comparison"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC"), P("prop_2"), V("val_1", "prop_1")],
        question="Classify {label_1} nodes as high or low depending on whether {prop_1} reaches {val_1}.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_2}, "
            "CASE WHEN n.{prop_1} >= {val_1} THEN 'high' ELSE 'low' END LIMIT 10"
        ),
    ),
    dict(
        id="number-to-string",
        syntax_tags=["string-function", "numeric-function"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC")],
        question="Render the {prop_1} of {label_1} nodes as text.",
        cypher="MATCH (n:{label_1}) RETURN toString(n.{prop_1}) LIMIT 5",
    ),
    # --- list properties -------------------------------------------------------------
    dict(
        id="unwind-list-property",
        syntax_tags=["list", "unwind", "distinct"],
        capabilities=["LIST"],
        slots=[L1, P("prop_1", type="LIST")],
        question="Enumerate the individual entries of {prop_1} across {label_1} nodes.",
        cypher=(
            "MATCH (n:{label_1}) UNWIND n.{prop_1} AS item "
            "RETURN DISTINCT item ORDER BY item LIMIT 10"
        ),
    ),
    dict(
        id="list-size",
        syntax_tags=["list"],
        capabilities=["LIST"],
        slots=[L1, P("prop_1", type="LIST"), P("prop_2")],
        question="How many entries does each {label_1}'s {prop_1} hold?",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_2}, size(n.{prop_1}) LIMIT 10",
    ),
    dict(
        id="list-membership",
        syntax_tags=["list", "in-list"],
        capabilities=["LIST"],
        slots=[L1, P("prop_1", type="LIST"), P("prop_2"), V("val_1", "prop_1")],
        question="Which {label_1} nodes include '{val_1}' in their {prop_1}?",
        cypher="MATCH (n:{label_1}) WHERE {val_1} IN n.{prop_1} RETURN n.{prop_2} LIMIT 10",
    ),
    dict(
        id="list-head",
        syntax_tags=["list"],
        capabilities=["LIST"],
        slots=[L1, P("prop_1", type="LIST")],
        question="What is the first entry of {prop_1} for {label_1} nodes?",
        cypher="MATCH (n:{label_1}) RETURN head(n.{prop_1}) LIMIT 5",
    ),
    dict(
        id="list-first-index",
        syntax_tags=["list"],
        capabilities=["LIST"],
        slots=[L1, P("prop_1", type="LIST")],
        question="Fetch {prop_1}[0] for {label_1} nodes.",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_1}[0] LIMIT 5",
    ),
    # --- dates ------------------------------------------------------------------------
    dict(
        id="date-threshold-filter",
        syntax_tags=["date", "comparison"],
        capabilities=["DATE"],
        subschema=SUB,
        slots=[L1, P("prop_1"), P("prop_2", type="DATE")],
        question="Find all {prop_1} for {label_1} that have {prop_2} after January 1, 2020!",
        cypher=(
            "MATCH (n:{label_1}) WHERE date(n.{prop_2}) > date('2020-01-01') "
            "RETURN n.{prop_1}"
        ),
    ),
    dict(
        id="date-before-value",
        syntax_tags=["date", "comparison"],
        capabilities=["DATE"],
        slots=[L1, P("prop_1"), P("prop_2", type="DATE"), V("val_1", "prop_2")],
        question="Which {label_1} nodes have {prop_2} earlier than {val_1}?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_2} < {val_1} RETURN n.{prop_1} LIMIT 10",
    ),
    dict(
        id="date-year-component",
        syntax_tags=["date"],
        capabilities=["DATE"],
        slots=[L1, P("prop_1"), P("prop_2", type="DATE")],
        question="In which year does each {label_1}'s {prop_2} fall?",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_1}, n.{prop_2}.year LIMIT 10",
    ),
    dict(
        id="latest-by-date",
        syntax_tags=["date", "order-limit"],
        capabilities=["DATE"],
        slots=[L1, P("prop_1"), P("prop_2", type="DATE")],
        question="Which {label_1} nodes have the most recent {prop_2}?",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_1} ORDER BY n.{prop_2} DESC LIMIT 5",
    ),
    dict(
        id="date-on-or-after-count",
        syntax_tags=["date", "comparison", "aggregation"],
        capabilities=["DATE"],
        slots=[L1, P("prop_2", type="DATE"), V("val_1", "prop_2")],
        question="How many {label_1} nodes have {prop_2} on or after {val_1}?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_2} >= {val_1} RETURN count(n)",
    ),
    # --- modern syntax (Neo4j 5 era) ----------------------------------------------------
    dict(
        id="exists-subquery",
        syntax_tags=["exists-subquery", "modern"],
        slots=[
            L1, P("prop_1"), R("rel_1", source="label_1"), LBL("label_2", "rel_1", "target"),
        ],
        question="Which {label_1} nodes have at least one {rel_1} link to a {label_2}?",
        cypher=(
            "MATCH (n:{label_1}) WHERE EXISTS {{ (n)-[:{rel_1}]->(:{label_2}) }} "
            "RETURN n.{prop_1} LIMIT 10"
        ),
    ),
    dict(
        id="count-subquery-degree",
        syntax_tags=["count-subquery", "modern", "order-limit"],
        slots=[L1, P("prop_1"), R("rel_1", source="label_1")],
        question="Rank {label_1} nodes by their number of outgoing {rel_1} relations.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_1}, "
            "COUNT {{ (n)-[:{rel_1}]->() }} AS degree ORDER BY degree DESC LIMIT 5"
        ),
    ),
    dict(
        id="exists-subquery-filtered",
        syntax_tags=["exists-subquery", "modern", "filter"],
        slots=[
            L1, P("prop_1"), R("rel_1", source="label_1"), LBL("label_2", "rel_1", "target"),
            P("prop_2", of="label_2"), V("val_1", "prop_2"),
        ],
        question="Which {label_1} nodes link via {rel_1} to the {label_2} named '{val_1}'?",
        cypher=(
            "MATCH (n:{label_1}) WHERE EXISTS {{ (n)-[:{rel_1}]->(b:{label_2}) "
            "WHERE b.{prop_2} = {val_1} }} RETURN n.{prop_1} LIMIT 10"
        ),
    ),
    dict(
        id="element-ids",
        syntax_tags=["modern", "introspection"],
        slots=[L1, P("prop_1")],
        question="Show element ids alongside the {prop_1} of {label_1} nodes.",
        cypher="MATCH (n:{label_1}) RETURN elementId(n), n.{prop_1} LIMIT 5",
    ),
    dict(
        id="count-subquery-threshold",
        syntax_tags=["count-subquery", "modern", "aggregation"],
        slots=[L1, R("rel_1", source="label_1")],
        question="How many {label_1} nodes have two or more {rel_1} relations?",
        cypher=(
            "MATCH (n:{label_1}) WHERE COUNT {{ (n)-[:{rel_1}]->() }} >= 2 "
            "RETURN count(n)"
        ),
    ),
    dict(
        id="union-two-labels",
        syntax_tags=["union", "modern"],
        slots=[L1, P("prop_1"), {"name": "label_2", "kind": "node-label", "distinct_from": ["label_1"]},
               P("prop_2", of="label_2")],
        question="Combine the {prop_1} values of {label_1} nodes with the {prop_2} values of {label_2} nodes.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_1} AS value "
            "UNION MATCH (m:{label_2}) RETURN m.{prop_2} AS value"
        ),
    ),
    dict(
        id="union-all-two-labels",
        syntax_tags=["union", "modern"],
        slots=[L1, P("prop_1"), {"name": "label_2", "kind": "node-label", "distinct_from": ["label_1"]},
               P("prop_2", of="label_2")],
        question="List every {prop_1} of {label_1} nodes and every {prop_2} of {label_2} nodes, duplicates included.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_1} AS value "
            "UNION ALL MATCH (m:{label_2}) RETURN m.{prop_2} AS value"
        ),
    ),
    dict(
        id="regex-nonempty",
        syntax_tags=["regex", "modern", "aggregation"],
        slots=[L1, P("prop_1")],
        question="How many {label_1} nodes have a non-empty {prop_1}?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} =~ '.+' RETURN count(n)",
    ),
    dict(
        id="collect-then-unwind",
        syntax_tags=["with-chain", "unwind", "modern"],
        slots=[L1, P("prop_1")],
        question="Gather the {prop_1} values of {label_1} nodes and replay the first three.",
        cypher=(
            "MATCH (n:{label_1}) WITH collect(n.{prop_1}) AS values "
            "UNWIND values[0..3] AS v RETURN v"
        ),
    ),
    dict(
        id="list-slice",
        syntax_tags=["list", "modern"],
        capabilities=["LIST"],
        slots=[L1, P("prop_1", type="LIST")],
        question="Show the first two entries of {prop_1} for {label_1} nodes.",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_1}[0..2] LIMIT 5",
    ),
    dict(
        id="order-by-two-keys",
        syntax_tags=["order-limit", "modern"],
        capabilities=["NUMERIC"],
        slots=[L1, P("prop_1", type="NUMERIC"), P("prop_2")],
        question="Sort {label_1} nodes by {prop_1} descending, breaking ties on {prop_2}.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_2}, n.{prop_1} "
            "ORDER BY n.{prop_1} DESC, n.{prop_2} ASC LIMIT 10"
        ),
    ),
    dict(
        id="pagination",
        syntax_tags=["pagination", "order-limit", "modern"],
        slots=[L1, P("prop_1")],
        question="Show the second page of five {label_1} nodes ordered by {prop_1}.",
        cypher="MATCH (n:{label_1}) RETURN n.{prop_1} ORDER BY n.{prop_1} SKIP 5 LIMIT 5",
    ),
    dict(
        id="mean-degree",
        syntax_tags=["with-chain", "aggregation", "modern"],
        slots=[L1, R("rel_1", source="label_1")],
        question="On average, how many {rel_1} relations does a {label_1} node have?",
        cypher=(
            "MATCH (a:{label_1})-[:{rel_1}]->(b) WITH a, count(b) AS n "
            "WITH avg(n) AS mean RETURN mean"
        ),
    ),
    dict(
        id="keys-introspection",
        syntax_tags=["introspection", "modern"],
        slots=[L1],
        question="Which property keys does a {label_1} node carry?",
        cypher="MATCH (n:{label_1}) RETURN keys(n) LIMIT 1",
    ),
    dict(
        id="properties-map",
        syntax_tags=["introspection", "modern"],
        slots=[L1],
        question="Dump the full property map of a few {label_1} nodes.",
        cypher="MATCH (n:{label_1}) RETURN properties(n) LIMIT 3",
    ),
    dict(
        id="case-on-value",
        syntax_tags=["case", "modern"],
        slots=[L1, P("prop_1"), V("val_1", "prop_1")],
        question="Mark each {label_1} according to whether its {prop_1} matches {val_1}.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_1}, "
            "CASE n.{prop_1} WHEN {val_1} THEN 'matched' ELSE 'other' END LIMIT 10"
        ),
    ),
    dict(
        id="boolean-true-count",
        syntax_tags=["boolean", "aggregation"],
        capabilities=["BOOLEAN"],
        slots=[L1, P("prop_1", type="BOOLEAN")],
        question="How many {label_1} nodes have {prop_1} enabled?",
        cypher="MATCH (n:{label_1}) WHERE n.{prop_1} = true RETURN count(n)",
    ),
    dict(
        id="boolean-breakdown",
        syntax_tags=["boolean", "aggregation", "modern"],
        capabilities=["BOOLEAN"],
        slots=[L1, P("prop_1", type="BOOLEAN")],
        question="Break down {label_1} nodes by their {prop_1} flag.",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_1} AS flag, count(*) AS n ORDER BY flag"
        ),
    ),
    dict(
        id="year-breakdown",
        syntax_tags=["date", "aggregation", "modern"],
        capabilities=["DATE"],
        slots=[L1, P("prop_2", type="DATE")],
        question="How many {label_1} nodes fall into each {prop_2} year?",
        cypher=(
            "MATCH (n:{label_1}) RETURN n.{prop_2}.year AS y, count(*) AS n ORDER BY y"
        ),
    ),
    dict(
        id="distinct-pair-projection",
        syntax_tags=["distinct", "relationship", "modern"],
        slots=[
            L1, P("prop_1"), R("rel_1", source="label_1"),
            LBL("label_2", "rel_1", "target"), P("prop_2", of="label_2"),
        ],
        question="List distinct ({prop_1}, {prop_2}) pairs connected by {rel_1}.",
        cypher=(
            "MATCH (a:{label_1})-[:{rel_1}]->(b:{label_2}) "
            "RETURN DISTINCT a.{prop_1}, b.{prop_2} ORDER BY a.{prop_1} LIMIT 10"
        ),
    ),
]


def main() -> int:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for stale in OUT_DIR.glob("*.yaml"):
        stale.unlink()
    ids = set()
    for index, template in enumerate(TEMPLATES):
        if template["id"] in ids:
            raise SystemExit(f"duplicate template id {template['id']}")
        ids.add(template["id"])
        payload = {
            "id": template["id"],
            "syntax_tags": template.get("syntax_tags", []),
            "capabilities": template.get("capabilities", []),
            "subschema": template.get("subschema", SUB),
            "slots": template["slots"],
            "question": template["question"],
            "cypher": template["cypher"],
        }
        path = OUT_DIR / f"{index:03d}_{template['id']}.yaml"
        path.write_text(
            yaml.safe_dump(payload, sort_keys=False, allow_unicode=True, width=100),
            encoding="utf-8",
        )
    print(f"wrote {len(TEMPLATES)} templates to {OUT_DIR}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
