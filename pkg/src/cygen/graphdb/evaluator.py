"""Executor for the embedded Cypher engine.

Evaluates parsed queries against a MemoryGraph with Cypher-style semantics:
three-valued logic, null propagation, implicit grouping on aggregation,
relationship uniqueness within a MATCH, and a deterministic global ordering.
The engine is read-only by construction (the parser rejects write clauses).
"""

from __future__ import annotations

import datetime as dt
import math
import re
import time
from dataclasses import dataclass
from typing import Any, Iterator, Optional

from ..errors import CypherRuntimeError, CypherSyntaxError, QueryTimeout
from . import ast
from .memgraph import MemoryGraph, Node, Path, Relationship
from .parser import parse

AGGREGATES = {"count", "sum", "avg", "min", "max", "collect"}


@dataclass
class Result:
    columns: list[str]
    rows: list[dict[str, Any]]

    def values(self, column: str | None = None) -> list[Any]:
        col = column or self.columns[0]
        return [row[col] for row in self.rows]


class _Deadline:
    __slots__ = ("at", "ticks")

    def __init__(self, timeout: Optional[float]):
        self.at = None if timeout is None else time.monotonic() + timeout
        self.ticks = 0

    def tick(self) -> None:
        self.ticks += 1
        if self.at is not None and self.ticks % 256 == 0 and time.monotonic() > self.at:
            raise QueryTimeout("query execution exceeded its deadline")


def run_query(
    graph: MemoryGraph,
    text: str,
    parameters: Optional[dict[str, Any]] = None,
    timeout: Optional[float] = None,
) -> Result:
    query = parse(text)
    deadline = _Deadline(timeout)
    params = parameters or {}
    results = [_run_single(graph, part, params, deadline) for part in query.parts]
    if len(results) == 1:
        return results[0]
    columns = results[0].columns
    for res in results[1:]:
        if res.columns != columns:
            raise CypherRuntimeError("all UNION parts must have the same column names")
    rows: list[dict[str, Any]] = []
    for res in results:
        rows.extend(res.rows)
    if not all(query.union_all):
        seen: set = set()
        deduped = []
        for row in rows:
            key = tuple(canonical_key(row[c]) for c in columns)
            if key not in seen:
                seen.add(key)
                deduped.append(row)
        rows = deduped
    return Result(columns, rows)


def _run_single(
    graph: MemoryGraph, single: ast.SingleQuery, params: dict, deadline: _Deadline
) -> Result:
    ev = _Evaluator(graph, params, deadline)
    rows: list[dict[str, Any]] = [{}]
    result: Optional[Result] = None
    for idx, clause in enumerate(single.clauses):
        if result is not None:
            raise CypherSyntaxError("no clause may follow RETURN")
        if isinstance(clause, ast.Match):
            rows = ev.run_match(clause, rows)
        elif isinstance(clause, ast.Unwind):
            rows = ev.run_unwind(clause, rows)
        elif isinstance(clause, ast.CallProc):
            rows = ev.run_call(clause, rows)
        elif isinstance(clause, ast.Projection):
            if clause.kind == "return":
                result = ev.run_projection(clause, rows, final=True)
            else:
                rows = ev.run_projection(clause, rows, final=False)  # type: ignore[assignment]
        else:  # pragma: no cover - parser only emits the above
            raise CypherRuntimeError(f"unhandled clause {clause!r}")
    if result is None:
        last = single.clauses[-1]
        if isinstance(last, ast.CallProc):
            columns = sorted(rows[0].keys()) if rows else list(last.yields)
            return Result(list(columns), rows)
        raise CypherSyntaxError("query must end with RETURN or a standalone CALL")
    return result


class _Evaluator:
    def __init__(self, graph: MemoryGraph, params: dict, deadline: _Deadline):
        self.graph = graph
        self.params = params
        self.deadline = deadline

    # ------------------------------------------------------------------ MATCH

    def run_match(self, clause: ast.Match, rows: list[dict]) -> list[dict]:
        out: list[dict] = []
        new_vars = _pattern_vars(clause.patterns)
        for env in rows:
            matches: list[dict] = []
            for bound in self._match_patterns(clause.patterns, env):
                if clause.where is not None:
                    if self.eval_expr(clause.where, bound) is not True:
                        continue
                matches.append(bound)
            if matches:
                out.extend(matches)
            elif clause.optional:
                null_env = dict(env)
                for name in new_vars:
                    null_env.setdefault(name, None)
                out.append(null_env)
        return out

    def _match_patterns(self, patterns: tuple[ast.PatternPart, ...], env: dict) -> Iterator[dict]:
        def expand(idx: int, current: dict, used: frozenset) -> Iterator[dict]:
            if idx == len(patterns):
                yield current
                return
            for nxt, used2 in self._match_part(patterns[idx], current, used):
                yield from expand(idx + 1, nxt, used2)

        yield from expand(0, env, frozenset())

    def _match_part(
        self, part: ast.PatternPart, env: dict, used: frozenset
    ) -> Iterator[tuple[dict, frozenset]]:
        if part.shortest is not None:
            yield from self._match_shortest(part, env, used)
            return
        elements = part.elements
        first: ast.NodePat = elements[0]

        def walk(
            pos: int, node: Node, current: dict, used_here: frozenset,
            path_nodes: tuple, path_rels: tuple,
        ) -> Iterator[tuple[dict, frozenset]]:
            self.deadline.tick()
            if pos >= len(elements):
                final = current
                if part.var is not None:
                    final = dict(current)
                    final[part.var] = Path(path_nodes, path_rels)
                yield final, used_here
                return
            rel_pat: ast.RelPat = elements[pos]
            node_pat: ast.NodePat = elements[pos + 1]
            if rel_pat.var_length:
                for rels, nodes in self._var_length_walks(rel_pat, node, current, used_here):
                    end = nodes[-1]
                    nxt = self._bind_node(node_pat, end, current)
                    if nxt is None:
                        continue
                    if rel_pat.var is not None:
                        nxt = dict(nxt)
                        nxt[rel_pat.var] = list(rels)
                    yield from walk(
                        pos + 2, end, nxt, used_here | {r.id for r in rels},
                        path_nodes + tuple(nodes), path_rels + tuple(rels),
                    )
            else:
                for rel, end in self._adjacent(node, rel_pat):
                    if rel.id in used_here:
                        continue
                    if not self._props_ok(rel_pat.props, rel.properties, current):
                        continue
                    if rel_pat.var is not None:
                        bound = current.get(rel_pat.var)
                        if bound is not None and not (isinstance(bound, Relationship) and bound.id == rel.id):
                            continue
                    nxt = self._bind_node(node_pat, end, current)
                    if nxt is None:
                        continue
                    if rel_pat.var is not None:
                        nxt = dict(nxt)
                        nxt[rel_pat.var] = rel
                    yield from walk(
                        pos + 2, end, nxt, used_here | {rel.id},
                        path_nodes + (end,), path_rels + (rel,),
                    )

        for start in self._node_candidates(first, env):
            bound = self._bind_node(first, start, env)
            if bound is None:
                continue
            yield from walk(1, start, bound, used, (start,), ())

    def _match_shortest(
        self, part: ast.PatternPart, env: dict, used: frozenset
    ) -> Iterator[tuple[dict, frozenset]]:
        elements = part.elements
        if len(elements) != 3:
            raise CypherRuntimeError("shortestPath takes a single relationship pattern")
        start_pat, rel_pat, end_pat = elements
        max_hops = rel_pat.max_hops if rel_pat.var_length else 1
        for start in self._node_candidates(start_pat, env):
            env_s = self._bind_node(start_pat, start, env)
            if env_s is None:
                continue
            for end in self._node_candidates(end_pat, env_s):
                env_e = self._bind_node(end_pat, end, env_s)
                if env_e is None:
                    continue
                paths = self._bfs_shortest(start, end, rel_pat, env_e, max_hops)
                if not paths:
                    continue
                if part.shortest == "shortestPath":
                    paths = paths[:1]
                for nodes, rels in paths:
                    final = dict(env_e)
                    if part.var is not None:
                        final[part.var] = Path(tuple(nodes), tuple(rels))
                    if rel_pat.var is not None:
                        final[rel_pat.var] = list(rels)
                    yield final, used | {r.id for r in rels}

    def _bfs_shortest(
        self, start: Node, end: Node, rel_pat: ast.RelPat, env: dict, max_hops: Optional[int]
    ) -> list[tuple[list[Node], list[Relationship]]]:
        if start.id == end.id:
            return []
        frontier: list[tuple[list[Node], list[Relationship]]] = [([start], [])]
        visited = {start.id}
        depth = 0
        while frontier and (max_hops is None or depth < max_hops):
            depth += 1
            nxt: list[tuple[list[Node], list[Relationship]]] = []
            found: list[tuple[list[Node], list[Relationship]]] = []
            layer_nodes: set[int] = set()
            for nodes, rels in frontier:
                self.deadline.tick()
                for rel, neighbor in self._adjacent(nodes[-1], rel_pat):
                    if neighbor.id in visited:
                        continue
                    if not self._props_ok(rel_pat.props, rel.properties, env):
                        continue
                    walk = (nodes + [neighbor], rels + [rel])
                    if neighbor.id == end.id:
                        found.append(walk)
                    else:
                        layer_nodes.add(neighbor.id)
                        nxt.append(walk)
            if found:
                return found
            visited |= layer_nodes
            frontier = nxt
        return []

    def _var_length_walks(
        self, rel_pat: ast.RelPat, start: Node, env: dict, used: frozenset
    ) -> Iterator[tuple[list[Relationship], list[Node]]]:
        min_hops = rel_pat.min_hops
        max_hops = rel_pat.max_hops

        def dfs(node: Node, rels: list, nodes: list, seen: set) -> Iterator:
            self.deadline.tick()
            if len(rels) >= min_hops:
                yield list(rels), list(nodes)
            if max_hops is not None and len(rels) >= max_hops:
                return
            for rel, neighbor in self._adjacent(node, rel_pat):
                if rel.id in seen or rel.id in used:
                    continue
                if not self._props_ok(rel_pat.props, rel.properties, env):
                    continue
                rels.append(rel)
                nodes.append(neighbor)
                seen.add(rel.id)
                yield from dfs(neighbor, rels, nodes, seen)
                seen.discard(rel.id)
                nodes.pop()
                rels.pop()

        if min_hops == 0:
            yield [], [start]
        yield from dfs(start, [], [start], set())

    def _adjacent(self, node: Node, rel_pat: ast.RelPat) -> Iterator[tuple[Relationship, Node]]:
        types = rel_pat.types
        if rel_pat.direction in ("right", "undirected"):
            for rel in self.graph.out_rels(node.id):
                if not types or rel.type in types:
                    yield rel, self.graph.nodes[rel.end_id]
        if rel_pat.direction in ("left", "undirected"):
            for rel in self.graph.in_rels(node.id):
                if not types or rel.type in types:
                    yield rel, self.graph.nodes[rel.start_id]

    def _node_candidates(self, pat: ast.NodePat, env: dict) -> list[Node]:
        if pat.var is not None and pat.var in env and env[pat.var] is not None:
            bound = env[pat.var]
            if not isinstance(bound, Node):
                raise CypherRuntimeError(f"variable {pat.var} is not a node")
            return [bound]
        if pat.labels:
            return self.graph.nodes_with_label(pat.labels[0])
        return self.graph.all_nodes()

    def _bind_node(self, pat: ast.NodePat, node: Node, env: dict) -> Optional[dict]:
        for label in pat.labels:
            if label not in node.labels:
                return None
        if not self._props_ok(pat.props, node.properties, env):
            return None
        if pat.var is None:
            return env
        if pat.var in env:
            bound = env[pat.var]
            # a null binding (from OPTIONAL MATCH) can never re-match
            if isinstance(bound, Node) and bound.id == node.id:
                return env
            return None
        nxt = dict(env)
        nxt[pat.var] = node
        return nxt

    def _props_ok(self, props: Optional[ast.MapLit], actual: dict, env: dict) -> bool:
        if props is None:
            return True
        for key, expr in props.items:
            want = self.eval_expr(expr, env)
            if eq3(actual.get(key), want) is not True:
                return False
        return True

    # ----------------------------------------------------------------- UNWIND

    def run_unwind(self, clause: ast.Unwind, rows: list[dict]) -> list[dict]:
        out = []
        for env in rows:
            value = self.eval_expr(clause.expr, env)
            if value is None:
                continue
            if not isinstance(value, list):
                raise CypherRuntimeError("UNWIND expects a list")
            for item in value:
                nxt = dict(env)
                nxt[clause.var] = item
                out.append(nxt)
        return out

    # ------------------------------------------------------------------- CALL

    def run_call(self, clause: ast.CallProc, rows: list[dict]) -> list[dict]:
        proc_rows = _run_procedure(self.graph, clause.name)
        if clause.yields:
            for name in clause.yields:
                if proc_rows and name not in proc_rows[0]:
                    raise CypherRuntimeError(f"procedure {clause.name} does not yield {name}")
            proc_rows = [{k: row[k] for k in clause.yields} for row in proc_rows]
        out = []
        for env in rows:
            for prow in proc_rows:
                merged = dict(env)
                merged.update(prow)
                out.append(merged)
        return out

    # -------------------------------------------------------------- WITH/RETURN

    def run_projection(self, clause: ast.Projection, rows: list[dict], final: bool):
        items = list(clause.items)
        if clause.star:
            star_names = sorted(rows[0].keys()) if rows else []
            star_items = [ast.ReturnItem(ast.Var(n), n) for n in star_names]
            items = star_items + items
        has_agg = any(_contains_aggregate(item.expr) for item in items)
        if clause.star and has_agg:
            raise CypherRuntimeError("* cannot be combined with aggregation")

        names: list[str] = []
        for item in items:
            name = item.alias if item.alias is not None else _expr_text(item.expr)
            if clause.kind == "with" and item.alias is None and not isinstance(item.expr, ast.Var):
                raise CypherSyntaxError("WITH requires AS for non-variable expressions")
            names.append(name)

        projected: list[tuple[dict, dict]]  # (sort env, projected env)
        if has_agg:
            projected = self._project_aggregated(items, names, rows)
        else:
            projected = []
            for env in rows:
                self.deadline.tick()
                proj = {name: self.eval_expr(item.expr, env) for name, item in zip(names, items)}
                projected.append(({**env, **proj}, proj))

        if clause.distinct:
            seen: set = set()
            uniq = []
            for sort_env, proj in projected:
                key = tuple(canonical_key(proj[n]) for n in names)
                if key not in seen:
                    seen.add(key)
                    uniq.append((sort_env, proj))
            projected = uniq

        if clause.order:
            def sort_key(entry: tuple[dict, dict]):
                sort_env = entry[0]
                keys = []
                for oi in clause.order:
                    if _contains_aggregate(oi.expr) and "__group_rows__" in sort_env:
                        value = self._eval_group_expr(oi.expr, sort_env["__group_rows__"])
                    else:
                        value = self.eval_expr(oi.expr, sort_env)
                    keys.append(_OrderKey(value, oi.descending))
                return tuple(keys)

            projected.sort(key=sort_key)

        if clause.skip is not None:
            n = self._int_arg(clause.skip, "SKIP")
            projected = projected[n:]
        if clause.limit is not None:
            n = self._int_arg(clause.limit, "LIMIT")
            projected = projected[:n]

        if clause.where is not None:
            projected = [
                (sort_env, proj)
                for sort_env, proj in projected
                if self.eval_expr(clause.where, proj) is True
            ]

        if final:
            return Result(names, [proj for _, proj in projected])
        return [dict(proj) for _, proj in projected]

    def _project_aggregated(
        self, items: list[ast.ReturnItem], names: list[str], rows: list[dict]
    ) -> list[tuple[dict, dict]]:
        plain = [(n, it) for n, it in zip(names, items) if not _contains_aggregate(it.expr)]
        groups: dict[tuple, tuple[dict, list[dict]]] = {}
        for env in rows:
            self.deadline.tick()
            key_vals = {n: self.eval_expr(it.expr, env) for n, it in plain}
            key = tuple(canonical_key(key_vals[n]) for n, _ in plain)
            if key not in groups:
                groups[key] = (key_vals, [])
            groups[key][1].append(env)
        if not groups and not plain:
            groups[()] = ({}, [])  # aggregates over zero rows still yield one row
        out: list[tuple[dict, dict]] = []
        for key_vals, group_rows in groups.values():
            proj = dict(key_vals)
            for name, item in zip(names, items):
                if name in proj:
                    continue
                proj[name] = self._eval_group_expr(item.expr, group_rows)
            sort_env = dict(group_rows[0]) if group_rows else {}
            sort_env.update(proj)
            sort_env["__group_rows__"] = group_rows
            out.append((sort_env, proj))
        return out

    def _eval_group_expr(self, expr: ast.Expr, group_rows: list[dict]) -> Any:
        # compute aggregate subtrees over the group, then evaluate the rest on
        # a representative row (non-aggregate leaves are grouping-constant)
        rewritten = self._fold_aggregates(expr, group_rows)
        env = group_rows[0] if group_rows else {}
        return self.eval_expr(rewritten, env)

    def _fold_aggregates(self, expr: ast.Expr, group_rows: list[dict]) -> ast.Expr:
        if isinstance(expr, ast.CountStar):
            return ast.Lit(len(group_rows))
        if isinstance(expr, ast.FuncCall):
            if expr.name in AGGREGATES:
                return ast.Lit(self._eval_aggregate(expr, group_rows))
            return ast.FuncCall(
                expr.name,
                tuple(self._fold_aggregates(a, group_rows) for a in expr.args),
                expr.distinct,
            )
        if isinstance(expr, ast.Binary):
            return ast.Binary(
                expr.op,
                self._fold_aggregates(expr.left, group_rows),
                self._fold_aggregates(expr.right, group_rows),
            )
        if isinstance(expr, ast.Unary):
            return ast.Unary(expr.op, self._fold_aggregates(expr.operand, group_rows))
        if isinstance(expr, ast.CmpChain):
            return ast.CmpChain(
                self._fold_aggregates(expr.first, group_rows),
                tuple((op, self._fold_aggregates(e, group_rows)) for op, e in expr.rest),
            )
        if isinstance(expr, ast.Predicate):
            operand = None if expr.operand is None else self._fold_aggregates(expr.operand, group_rows)
            return ast.Predicate(expr.op, self._fold_aggregates(expr.target, group_rows), operand)
        if isinstance(expr, ast.Prop):
            return ast.Prop(self._fold_aggregates(expr.target, group_rows), expr.key)
        if isinstance(expr, ast.Index):
            return ast.Index(
                self._fold_aggregates(expr.target, group_rows),
                self._fold_aggregates(expr.index, group_rows),
            )
        if isinstance(expr, ast.Slice):
            return ast.Slice(
                self._fold_aggregates(expr.target, group_rows),
                None if expr.lo is None else self._fold_aggregates(expr.lo, group_rows),
                None if expr.hi is None else self._fold_aggregates(expr.hi, group_rows),
            )
        if isinstance(expr, ast.ListLit):
            return ast.ListLit(tuple(self._fold_aggregates(e, group_rows) for e in expr.items))
        if isinstance(expr, ast.MapLit):
            return ast.MapLit(
                tuple((k, self._fold_aggregates(e, group_rows)) for k, e in expr.items)
            )
        if isinstance(expr, ast.CaseExpr):
            return ast.CaseExpr(
                None if expr.subject is None else self._fold_aggregates(expr.subject, group_rows),
                tuple(
                    (self._fold_aggregates(c, group_rows), self._fold_aggregates(r, group_rows))
                    for c, r in expr.whens
                ),
                None if expr.default is None else self._fold_aggregates(expr.default, group_rows),
            )
        return expr

    def _eval_aggregate(self, expr: ast.FuncCall, group_rows: list[dict]) -> Any:
        if len(expr.args) != 1:
            raise CypherRuntimeError(f"{expr.name}() takes exactly one argument")
        values = []
        for env in group_rows:
            value = self.eval_expr(expr.args[0], env)
            if value is not None:
                values.append(value)
        if expr.distinct:
            seen: set = set()
            uniq = []
            for value in values:
                key = canonical_key(value)
                if key not in seen:
                    seen.add(key)
                    uniq.append(value)
            values = uniq
        name = expr.name
        if name == "count":
            return len(values)
        if name == "collect":
            return values
        if name == "sum":
            if not values:
                return 0
            _require_numbers(values, "sum")
            total = sum(values)
            return total
        if name == "avg":
            if not values:
                return None
            _require_numbers(values, "avg")
            return sum(values) / len(values)
        if name in ("min", "max"):
            if not values:
                return None
            ordered = sorted(values, key=lambda v: _OrderKey(v, False))
            return ordered[0] if name == "min" else ordered[-1]
        raise CypherRuntimeError(f"unknown aggregate {name}")

    def _int_arg(self, expr: ast.Expr, what: str) -> int:
        value = self.eval_expr(expr, {})
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise CypherRuntimeError(f"{what} expects a non-negative integer")
        return value

    # ------------------------------------------------------------- expressions

    def eval_expr(self, expr: ast.Expr, env: dict) -> Any:
        if isinstance(expr, ast.Lit):
            return expr.value
        if isinstance(expr, ast.Var):
            if expr.name not in env:
                raise CypherRuntimeError(f"variable {expr.name} is not defined")
            return env[expr.name]
        if isinstance(expr, ast.Param):
            if expr.name not in self.params:
                raise CypherRuntimeError(f"parameter ${expr.name} is not provided")
            return self.params[expr.name]
        if isinstance(expr, ast.ListLit):
            return [self.eval_expr(item, env) for item in expr.items]
        if isinstance(expr, ast.MapLit):
            return {key: self.eval_expr(value, env) for key, value in expr.items}
        if isinstance(expr, ast.Prop):
            return _prop_access(self.eval_expr(expr.target, env), expr.key)
        if isinstance(expr, ast.Index):
            return _index_access(self.eval_expr(expr.target, env), self.eval_expr(expr.index, env))
        if isinstance(expr, ast.Slice):
            target = self.eval_expr(expr.target, env)
            if target is None:
                return None
            if not isinstance(target, list):
                raise CypherRuntimeError("slicing expects a list")
            lo = None if expr.lo is None else self.eval_expr(expr.lo, env)
            hi = None if expr.hi is None else self.eval_expr(expr.hi, env)
            return target[lo:hi]
        if isinstance(expr, ast.Unary):
            return _unary_op(expr.op, self.eval_expr(expr.operand, env))
        if isinstance(expr, ast.Binary):
            if expr.op in ("AND", "OR", "XOR"):
                return _logic_op(
                    expr.op,
                    self.eval_expr(expr.left, env),
                    self.eval_expr(expr.right, env),
                )
            return _binary_op(expr.op, self.eval_expr(expr.left, env), self.eval_expr(expr.right, env))
        if isinstance(expr, ast.CmpChain):
            left = self.eval_expr(expr.first, env)
            outcome: Any = True
            for op, operand_expr in expr.rest:
                right = self.eval_expr(operand_expr, env)
                step = _compare(op, left, right)
                if step is False:
                    return False
                if step is None:
                    outcome = None
                left = right
            return outcome
        if isinstance(expr, ast.Predicate):
            return self._eval_predicate(expr, env)
        if isinstance(expr, ast.CountStar):
            raise CypherRuntimeError("count(*) is only valid in a projection")
        if isinstance(expr, ast.FuncCall):
            if expr.name in AGGREGATES:
                raise CypherRuntimeError(f"{expr.name}() is only valid in a projection")
            args = [self.eval_expr(arg, env) for arg in expr.args]
            return _call_function(expr.name, args)
        if isinstance(expr, ast.CaseExpr):
            return self._eval_case(expr, env)
        if isinstance(expr, ast.ExistsSub):
            for _ in self._subquery_matches(expr.pattern, expr.where, env):
                return True
            return False
        if isinstance(expr, ast.CountSub):
            return sum(1 for _ in self._subquery_matches(expr.pattern, expr.where, env))
        raise CypherRuntimeError(f"cannot evaluate {expr!r}")

    def _subquery_matches(self, pattern: ast.PatternPart, where: Optional[ast.Expr], env: dict):
        for bound, _ in self._match_part(pattern, env, frozenset()):
            if where is not None and self.eval_expr(where, bound) is not True:
                continue
            yield bound

    def _eval_predicate(self, expr: ast.Predicate, env: dict) -> Any:
        target = self.eval_expr(expr.target, env)
        if expr.op == "IS NULL":
            return target is None
        if expr.op == "IS NOT NULL":
            return target is not None
        operand = self.eval_expr(expr.operand, env) if expr.operand is not None else None
        if expr.op == "IN":
            if operand is None or target is None:
                return None
            if not isinstance(operand, list):
                raise CypherRuntimeError("IN expects a list")
            saw_null = False
            for item in operand:
                check = eq3(target, item)
                if check is True:
                    return True
                if check is None:
                    saw_null = True
            return None if saw_null else False
        if target is None or operand is None:
            return None
        if expr.op in ("STARTS WITH", "ENDS WITH", "CONTAINS"):
            if not isinstance(target, str) or not isinstance(operand, str):
                return None
            if expr.op == "STARTS WITH":
                return target.startswith(operand)
            if expr.op == "ENDS WITH":
                return target.endswith(operand)
            return operand in target
        raise CypherRuntimeError(f"unknown predicate {expr.op}")

    def _eval_case(self, expr: ast.CaseExpr, env: dict) -> Any:
        if expr.subject is not None:
            subject = self.eval_expr(expr.subject, env)
            for cond, result in expr.whens:
                if eq3(subject, self.eval_expr(cond, env)) is True:
                    return self.eval_expr(result, env)
        else:
            for cond, result in expr.whens:
                if self.eval_expr(cond, env) is True:
                    return self.eval_expr(result, env)
        return self.eval_expr(expr.default, env) if expr.default is not None else None


# --- pattern helpers -----------------------------------------------------------


def _pattern_vars(patterns: tuple[ast.PatternPart, ...]) -> list[str]:
    names: list[str] = []
    for part in patterns:
        if part.var:
            names.append(part.var)
        for element in part.elements:
            if getattr(element, "var", None):
                names.append(element.var)
    return names


# --- value semantics -----------------------------------------------------------


def eq3(a: Any, b: Any) -> Optional[bool]:
    """Cypher three-valued equality: null when either side is null."""
    if a is None or b is None:
        return None
    if isinstance(a, bool) or isinstance(b, bool):
        if isinstance(a, bool) and isinstance(b, bool):
            return a == b
        return False
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return float(a) == float(b)
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, dt.date) and isinstance(b, dt.date):
        return a == b
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return False
        saw_null = False
        for x, y in zip(a, b):
            check = eq3(x, y)
            if check is False:
                return False
            if check is None:
                saw_null = True
        return None if saw_null else True
    if isinstance(a, dict) and isinstance(b, dict):
        if set(a) != set(b):
            return False
        saw_null = False
        for key in a:
            check = eq3(a[key], b[key])
            if check is False:
                return False
            if check is None:
                saw_null = True
        return None if saw_null else True
    if isinstance(a, Node) and isinstance(b, Node):
        return a.id == b.id
    if isinstance(a, Relationship) and isinstance(b, Relationship):
        return a.id == b.id
    if isinstance(a, Path) and isinstance(b, Path):
        return a == b
    return False


def _compare(op: str, a: Any, b: Any) -> Optional[bool]:
    if op == "=":
        return eq3(a, b)
    if op == "<>":
        eq = eq3(a, b)
        return None if eq is None else not eq
    if a is None or b is None:
        return None
    ordered = _lt3(a, b)
    if ordered is None:
        return None
    less, equal = ordered
    if op == "<":
        return less
    if op == ">":
        return not less and not equal
    if op == "<=":
        return less or equal
    if op == ">=":
        return not less
    raise CypherRuntimeError(f"unknown comparison {op}")


def _lt3(a: Any, b: Any) -> Optional[tuple[bool, bool]]:
    """Returns (a<b, a==b) for orderable same-type values, else None."""
    if isinstance(a, bool) and isinstance(b, bool):
        return a < b, a == b
    if isinstance(a, bool) or isinstance(b, bool):
        return None
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a < b, float(a) == float(b)
    if isinstance(a, str) and isinstance(b, str):
        return a < b, a == b
    if isinstance(a, dt.date) and isinstance(b, dt.date):
        return a < b, a == b
    if isinstance(a, list) and isinstance(b, list):
        for x, y in zip(a, b):
            step = _lt3(x, y)
            if step is None:
                return None
            if not step[1]:
                return step[0], False
        return len(a) < len(b), len(a) == len(b)
    return None


def _logic_op(op: str, a: Any, b: Any) -> Optional[bool]:
    for v in (a, b):
        if v is not None and not isinstance(v, bool):
            raise CypherRuntimeError(f"{op} expects booleans")
    if op == "AND":
        if a is False or b is False:
            return False
        if a is None or b is None:
            return None
        return True
    if op == "OR":
        if a is True or b is True:
            return True
        if a is None or b is None:
            return None
        return False
    if a is None or b is None:
        return None
    return a != b  # XOR


def _unary_op(op: str, value: Any) -> Any:
    if op == "NOT":
        if value is None:
            return None
        if not isinstance(value, bool):
            raise CypherRuntimeError("NOT expects a boolean")
        return not value
    if value is None:
        return None
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise CypherRuntimeError(f"unary {op} expects a number")
    return -value if op == "-" else +value


def _binary_op(op: str, a: Any, b: Any) -> Any:
    if op in ("=", "<>", "<", ">", "<=", ">="):
        return _compare(op, a, b)
    if op == "=~":
        if a is None or b is None:
            return None
        if not isinstance(a, str) or not isinstance(b, str):
            return None
        return re.fullmatch(b, a) is not None
    if a is None or b is None:
        return None
    if op == "+":
        if isinstance(a, str) or isinstance(b, str):
            if isinstance(a, str) and isinstance(b, str):
                return a + b
            other = b if isinstance(a, str) else a
            if isinstance(other, (int, float)) and not isinstance(other, bool):
                return (a + _num_text(b)) if isinstance(a, str) else (_num_text(a) + b)
            raise CypherRuntimeError("cannot concatenate these types")
        if isinstance(a, list):
            return a + (b if isinstance(b, list) else [b])
        if isinstance(b, list):
            return [a] + b
        _require_numbers((a, b), "+")
        return a + b
    if isinstance(a, bool) or isinstance(b, bool):
        raise CypherRuntimeError(f"{op} expects numbers")
    if not isinstance(a, (int, float)) or not isinstance(b, (int, float)):
        raise CypherRuntimeError(f"{op} expects numbers")
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if isinstance(a, int) and isinstance(b, int):
            if b == 0:
                raise CypherRuntimeError("integer division by zero")
            return int(math.trunc(a / b))
        if b == 0:
            return math.inf if a > 0 else -math.inf if a < 0 else math.nan
        return a / b
    if op == "%":
        if b == 0:
            raise CypherRuntimeError("modulo by zero")
        if isinstance(a, int) and isinstance(b, int):
            return int(math.fmod(a, b))
        return math.fmod(a, b)
    if op == "^":
        return float(a) ** float(b)
    raise CypherRuntimeError(f"unknown operator {op}")


def _require_numbers(values, what: str) -> None:
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise CypherRuntimeError(f"{what} expects numbers, got {type(v).__name__}")


def _num_text(v: Any) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(v)
    return str(v)


def _prop_access(target: Any, key: str) -> Any:
    if target is None:
        return None
    if isinstance(target, (Node, Relationship)):
        return target.properties.get(key)
    if isinstance(target, dict):
        return target.get(key)
    if isinstance(target, dt.date):
        if key in ("year", "month", "day"):
            return getattr(target, key)
        if key == "week":
            return target.isocalendar()[1]
        raise CypherRuntimeError(f"unknown date component {key}")
    raise CypherRuntimeError(f"cannot access property {key} on {type(target).__name__}")


def _index_access(target: Any, index: Any) -> Any:
    if target is None or index is None:
        return None
    if isinstance(target, list):
        if isinstance(index, bool) or not isinstance(index, int):
            raise CypherRuntimeError("list index must be an integer")
        if -len(target) <= index < len(target):
            return target[index]
        return None
    if isinstance(target, (dict,)):
        if not isinstance(index, str):
            raise CypherRuntimeError("map key must be a string")
        return target.get(index)
    if isinstance(target, (Node, Relationship)):
        if not isinstance(index, str):
            raise CypherRuntimeError("property key must be a string")
        return target.properties.get(index)
    raise CypherRuntimeError(f"cannot index {type(target).__name__}")


# --- scalar functions ----------------------------------------------------------


def _call_function(name: str, args: list) -> Any:
    fn = _FUNCTIONS.get(name)
    if fn is None:
        raise CypherRuntimeError(f"unknown function {name}()")
    return fn(args)


def _arity(args: list, lo: int, hi: Optional[int], name: str) -> None:
    if len(args) < lo or (hi is not None and len(args) > hi):
        raise CypherRuntimeError(f"wrong number of arguments for {name}()")


def _null_in(args: list) -> bool:
    return any(a is None for a in args)


def _fn_coalesce(args: list) -> Any:
    for a in args:
        if a is not None:
            return a
    return None


def _fn_size(args: list) -> Any:
    _arity(args, 1, 1, "size")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, (list, str, dict)):
        return len(v)
    raise CypherRuntimeError("size() expects a list or string")


def _fn_length(args: list) -> Any:
    _arity(args, 1, 1, "length")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, Path):
        return len(v.rels)
    if isinstance(v, str):
        return len(v)
    raise CypherRuntimeError("length() expects a path")


def _fn_type(args: list) -> Any:
    _arity(args, 1, 1, "type")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, Relationship):
        return v.type
    raise CypherRuntimeError("type() expects a relationship")


def _fn_labels(args: list) -> Any:
    _arity(args, 1, 1, "labels")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, Node):
        return list(v.labels)
    raise CypherRuntimeError("labels() expects a node")


def _fn_keys(args: list) -> Any:
    _arity(args, 1, 1, "keys")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, (Node, Relationship)):
        return sorted(v.properties)
    if isinstance(v, dict):
        return sorted(v)
    raise CypherRuntimeError("keys() expects a node, relationship, or map")


def _fn_properties(args: list) -> Any:
    _arity(args, 1, 1, "properties")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, (Node, Relationship)):
        return dict(v.properties)
    if isinstance(v, dict):
        return dict(v)
    raise CypherRuntimeError("properties() expects a node or relationship")


def _fn_id(args: list) -> Any:
    _arity(args, 1, 1, "id")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, (Node, Relationship)):
        return v.id
    raise CypherRuntimeError("id() expects a node or relationship")


def _fn_element_id(args: list) -> Any:
    v = _fn_id(args)
    return None if v is None else str(v)


def _fn_to_string(args: list) -> Any:
    _arity(args, 1, 1, "toString")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, dt.date):
        return v.isoformat()
    raise CypherRuntimeError("toString() expects a scalar")


def _fn_to_integer(args: list) -> Any:
    _arity(args, 1, 1, "toInteger")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, bool):
        return 1 if v else 0
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return int(math.trunc(v))
    if isinstance(v, str):
        try:
            return int(v.strip())
        except ValueError:
            try:
                return int(math.trunc(float(v.strip())))
            except ValueError:
                return None
    raise CypherRuntimeError("toInteger() expects a scalar")


def _fn_to_float(args: list) -> Any:
    _arity(args, 1, 1, "toFloat")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, bool):
        raise CypherRuntimeError("toFloat() cannot convert booleans")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(v.strip())
        except ValueError:
            return None
    raise CypherRuntimeError("toFloat() expects a scalar")


def _fn_to_boolean(args: list) -> Any:
    _arity(args, 1, 1, "toBoolean")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, bool):
        return v
    if isinstance(v, str):
        low = v.strip().lower()
        return True if low == "true" else False if low == "false" else None
    raise CypherRuntimeError("toBoolean() expects a string or boolean")


def _str_fn(name: str, impl):
    def wrapper(args: list) -> Any:
        if _null_in(args):
            return None
        if not isinstance(args[0], str):
            raise CypherRuntimeError(f"{name}() expects a string")
        return impl(args)

    return wrapper


def _fn_substring(args: list) -> Any:
    _arity(args, 2, 3, "substring")
    if _null_in(args):
        return None
    s, start = args[0], args[1]
    if not isinstance(s, str) or isinstance(start, bool) or not isinstance(start, int):
        raise CypherRuntimeError("substring() expects (string, int[, int])")
    if len(args) == 3:
        length = args[2]
        if isinstance(length, bool) or not isinstance(length, int):
            raise CypherRuntimeError("substring() length must be an int")
        return s[start : start + length]
    return s[start:]


def _fn_range(args: list) -> Any:
    _arity(args, 2, 3, "range")
    if _null_in(args):
        return None
    lo, hi = args[0], args[1]
    step = args[2] if len(args) == 3 else 1
    for v in (lo, hi, step):
        if isinstance(v, bool) or not isinstance(v, int):
            raise CypherRuntimeError("range() expects integers")
    if step == 0:
        raise CypherRuntimeError("range() step cannot be zero")
    return list(range(lo, hi + (1 if step > 0 else -1), step))


def _list_fn(name: str, impl):
    def wrapper(args: list) -> Any:
        _arity(args, 1, 1, name)
        v = args[0]
        if v is None:
            return None
        if not isinstance(v, list):
            raise CypherRuntimeError(f"{name}() expects a list")
        return impl(v)

    return wrapper


def _fn_reverse(args: list) -> Any:
    _arity(args, 1, 1, "reverse")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, list):
        return list(reversed(v))
    if isinstance(v, str):
        return v[::-1]
    raise CypherRuntimeError("reverse() expects a list or string")


def _path_fn(name: str, impl):
    def wrapper(args: list) -> Any:
        _arity(args, 1, 1, name)
        v = args[0]
        if v is None:
            return None
        if not isinstance(v, Path):
            raise CypherRuntimeError(f"{name}() expects a path")
        return impl(v)

    return wrapper


def _math_fn(name: str, impl):
    def wrapper(args: list) -> Any:
        _arity(args, 1, 1, name)
        v = args[0]
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise CypherRuntimeError(f"{name}() expects a number")
        return impl(v)

    return wrapper


def _fn_round(args: list) -> Any:
    _arity(args, 1, 2, "round")
    if _null_in(args):
        return None
    v = args[0]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise CypherRuntimeError("round() expects a number")
    if len(args) == 2:
        precision = args[1]
        if isinstance(precision, bool) or not isinstance(precision, int):
            raise CypherRuntimeError("round() precision must be an int")
        return float(round(v + 0.0, precision))
    return float(math.floor(v + 0.5))


def _fn_date(args: list) -> Any:
    _arity(args, 0, 1, "date")
    if not args:
        return dt.date.today()
    v = args[0]
    if v is None:
        return None
    if isinstance(v, dt.date):
        return v
    if isinstance(v, str):
        try:
            return dt.date.fromisoformat(v)
        except ValueError as exc:
            raise CypherRuntimeError(f"date() cannot parse {v!r}") from exc
    if isinstance(v, dict):
        try:
            return dt.date(int(v["year"]), int(v.get("month", 1)), int(v.get("day", 1)))
        except (KeyError, ValueError) as exc:
            raise CypherRuntimeError("date() map needs year/month/day") from exc
    raise CypherRuntimeError("date() expects a string, date, or map")


def _fn_abs(args: list) -> Any:
    _arity(args, 1, 1, "abs")
    v = args[0]
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise CypherRuntimeError("abs() expects a number")
    return abs(v)


_FUNCTIONS = {
    "coalesce": _fn_coalesce,
    "size": _fn_size,
    "length": _fn_length,
    "char_length": _fn_size,
    "type": _fn_type,
    "labels": _fn_labels,
    "keys": _fn_keys,
    "properties": _fn_properties,
    "id": _fn_id,
    "elementid": _fn_element_id,
    "tostring": _fn_to_string,
    "tointeger": _fn_to_integer,
    "tofloat": _fn_to_float,
    "toboolean": _fn_to_boolean,
    "toupper": _str_fn("toUpper", lambda a: a[0].upper()),
    "tolower": _str_fn("toLower", lambda a: a[0].lower()),
    "trim": _str_fn("trim", lambda a: a[0].strip()),
    "ltrim": _str_fn("lTrim", lambda a: a[0].lstrip()),
    "rtrim": _str_fn("rTrim", lambda a: a[0].rstrip()),
    "replace": _str_fn("replace", lambda a: a[0].replace(a[1], a[2])),
    "split": _str_fn("split", lambda a: a[0].split(a[1])),
    "left": _str_fn("left", lambda a: a[0][: a[1]]),
    "right": _str_fn("right", lambda a: a[0][-a[1] :] if a[1] else ""),
    "substring": _fn_substring,
    "range": _fn_range,
    "head": _list_fn("head", lambda v: v[0] if v else None),
    "last": _list_fn("last", lambda v: v[-1] if v else None),
    "tail": _list_fn("tail", lambda v: v[1:]),
    "reverse": _fn_reverse,
    "nodes": _path_fn("nodes", lambda p: list(p.nodes)),
    "relationships": _path_fn("relationships", lambda p: list(p.rels)),
    "abs": _fn_abs,
    "ceil": _math_fn("ceil", lambda v: float(math.ceil(v))),
    "floor": _math_fn("floor", lambda v: float(math.floor(v))),
    "round": _fn_round,
    "sqrt": _math_fn("sqrt", lambda v: math.sqrt(v)),
    "sign": _math_fn("sign", lambda v: (v > 0) - (v < 0)),
    "date": _fn_date,
}


# --- global ordering -----------------------------------------------------------

_TYPE_RANK = {
    "number": 0,
    "str": 1,
    "bool": 2,
    "date": 3,
    "list": 4,
    "map": 5,
    "node": 6,
    "rel": 7,
    "path": 8,
}


def _order_projection(v: Any):
    if isinstance(v, bool):
        return _TYPE_RANK["bool"], v
    if isinstance(v, (int, float)):
        return _TYPE_RANK["number"], float(v)
    if isinstance(v, str):
        return _TYPE_RANK["str"], v
    if isinstance(v, dt.date):
        return _TYPE_RANK["date"], v.isoformat()
    if isinstance(v, list):
        return _TYPE_RANK["list"], tuple(_order_projection(x) for x in v)
    if isinstance(v, dict):
        return _TYPE_RANK["map"], tuple(sorted((k, _order_projection(x)) for k, x in v.items()))
    if isinstance(v, Node):
        return _TYPE_RANK["node"], v.id
    if isinstance(v, Relationship):
        return _TYPE_RANK["rel"], v.id
    if isinstance(v, Path):
        return _TYPE_RANK["path"], tuple(r.id for r in v.rels)
    raise CypherRuntimeError(f"cannot order {type(v).__name__}")


class _OrderKey:
    """Sortable wrapper: engine-global type order, nulls last ascending."""

    __slots__ = ("null", "proj", "descending")

    def __init__(self, value: Any, descending: bool):
        self.null = value is None
        self.proj = None if value is None else _order_projection(value)
        self.descending = descending

    def __lt__(self, other: "_OrderKey") -> bool:
        if self.null != other.null:
            less = other.null  # non-null sorts before null ascending
            return (not less) if self.descending else less
        if self.null:
            return False
        if self.proj == other.proj:
            return False
        less = self.proj < other.proj
        return (not less) if self.descending else less

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, _OrderKey):
            return NotImplemented
        return (self.null, self.proj) == (other.null, other.proj)


def canonical_key(v: Any):
    """Hashable identity used for DISTINCT, grouping, IN-set and UNION dedup."""
    if v is None:
        return ("null",)
    if isinstance(v, bool):
        return ("bool", v)
    if isinstance(v, (int, float)):
        return ("num", float(v))
    if isinstance(v, str):
        return ("str", v)
    if isinstance(v, dt.date):
        return ("date", v.isoformat())
    if isinstance(v, list):
        return ("list", tuple(canonical_key(x) for x in v))
    if isinstance(v, dict):
        return ("map", frozenset((k, canonical_key(x)) for k, x in v.items()))
    if isinstance(v, Node):
        return ("node", v.id)
    if isinstance(v, Relationship):
        return ("rel", v.id)
    if isinstance(v, Path):
        return ("path", tuple(r.id for r in v.rels))
    raise CypherRuntimeError(f"cannot hash {type(v).__name__}")


# --- aggregation detection and expression naming -------------------------------


def _contains_aggregate(expr: ast.Expr) -> bool:
    if isinstance(expr, ast.CountStar):
        return True
    if isinstance(expr, ast.FuncCall):
        if expr.name in AGGREGATES:
            return True
        return any(_contains_aggregate(a) for a in expr.args)
    if isinstance(expr, ast.Unary):
        return _contains_aggregate(expr.operand)
    if isinstance(expr, ast.Binary):
        return _contains_aggregate(expr.left) or _contains_aggregate(expr.right)
    if isinstance(expr, ast.CmpChain):
        return _contains_aggregate(expr.first) or any(_contains_aggregate(e) for _, e in expr.rest)
    if isinstance(expr, ast.Predicate):
        return _contains_aggregate(expr.target) or (
            expr.operand is not None and _contains_aggregate(expr.operand)
        )
    if isinstance(expr, (ast.ListLit,)):
        return any(_contains_aggregate(e) for e in expr.items)
    if isinstance(expr, ast.MapLit):
        return any(_contains_aggregate(e) for _, e in expr.items)
    if isinstance(expr, (ast.Prop, ast.Index, ast.Slice)):
        return _contains_aggregate(expr.target)
    if isinstance(expr, ast.CaseExpr):
        parts = [expr.subject] if expr.subject else []
        parts.extend(c for pair in expr.whens for c in pair)
        if expr.default:
            parts.append(expr.default)
        return any(_contains_aggregate(p) for p in parts if p is not None)
    return False


def _expr_text(expr: ast.Expr) -> str:
    """Best-effort rendering used for unaliased result column names."""
    if isinstance(expr, ast.Var):
        return expr.name
    if isinstance(expr, ast.Lit):
        if isinstance(expr.value, str):
            return f"'{expr.value}'"
        if expr.value is None:
            return "null"
        if isinstance(expr.value, bool):
            return "true" if expr.value else "false"
        return str(expr.value)
    if isinstance(expr, ast.Prop):
        return f"{_expr_text(expr.target)}.{expr.key}"
    if isinstance(expr, ast.CountStar):
        return "count(*)"
    if isinstance(expr, ast.FuncCall):
        inner = ", ".join(_expr_text(a) for a in expr.args)
        prefix = "DISTINCT " if expr.distinct else ""
        return f"{expr.name}({prefix}{inner})"
    if isinstance(expr, ast.Binary):
        return f"{_expr_text(expr.left)} {expr.op} {_expr_text(expr.right)}"
    if isinstance(expr, ast.Unary):
        return f"{expr.op}{_expr_text(expr.operand)}"
    if isinstance(expr, ast.Param):
        return f"${expr.name}"
    if isinstance(expr, ast.Index):
        return f"{_expr_text(expr.target)}[{_expr_text(expr.index)}]"
    return expr.__class__.__name__.lower()


# --- introspection procedures ---------------------------------------------------


def _neo4j_type_name(value: Any) -> str:
    if isinstance(value, bool):
        return "Boolean"
    if isinstance(value, int):
        return "Long"
    if isinstance(value, float):
        return "Double"
    if isinstance(value, str):
        return "String"
    if isinstance(value, dt.date):
        return "Date"
    if isinstance(value, list):
        inner = {_neo4j_type_name(x) for x in value if x is not None}
        if len(inner) == 1:
            return f"{inner.pop()}Array"
        return "AnyArray"
    return "Any"


def _run_procedure(graph: MemoryGraph, name: str) -> list[dict]:
    lname = name.lower()
    if lname == "db.labels":
        return [{"label": label} for label in graph.labels()]
    if lname == "db.relationshiptypes":
        return [{"relationshipType": t} for t in graph.rel_types()]
    if lname == "db.propertykeys":
        keys: set[str] = set()
        for node in graph.nodes.values():
            keys.update(node.properties)
        for rel in graph.rels.values():
            keys.update(rel.properties)
        return [{"propertyKey": k} for k in sorted(keys)]
    if lname == "db.schema.nodetypeproperties":
        return _node_type_properties(graph)
    if lname == "db.schema.reltypeproperties":
        return _rel_type_properties(graph)
    raise CypherRuntimeError(f"unknown procedure {name}")


def _node_type_properties(graph: MemoryGraph) -> list[dict]:
    by_type: dict[tuple[str, ...], list] = {}
    for node in graph.nodes.values():
        by_type.setdefault(node.labels, []).append(node)
    rows = []
    for labels in sorted(by_type):
        nodes = by_type[labels]
        node_type = "".join(f":`{l}`" for l in labels)
        prop_names = sorted({k for n in nodes for k in n.properties})
        if not prop_names:
            rows.append({
                "nodeType": node_type, "nodeLabels": list(labels),
                "propertyName": None, "propertyTypes": None, "mandatory": False,
            })
            continue
        for prop in prop_names:
            types = sorted({
                _neo4j_type_name(n.properties[prop])
                for n in nodes if n.properties.get(prop) is not None
            })
            mandatory = all(prop in n.properties for n in nodes)
            rows.append({
                "nodeType": node_type, "nodeLabels": list(labels),
                "propertyName": prop, "propertyTypes": types, "mandatory": mandatory,
            })
    return rows


def _rel_type_properties(graph: MemoryGraph) -> list[dict]:
    by_type: dict[str, list] = {}
    for rel in graph.rels.values():
        by_type.setdefault(rel.type, []).append(rel)
    rows = []
    for rel_type in sorted(by_type):
        rels = by_type[rel_type]
        prop_names = sorted({k for r in rels for k in r.properties})
        if not prop_names:
            rows.append({
                "relType": f":`{rel_type}`", "propertyName": None,
                "propertyTypes": None, "mandatory": False,
            })
            continue
        for prop in prop_names:
            types = sorted({
                _neo4j_type_name(r.properties[prop])
                for r in rels if r.properties.get(prop) is not None
            })
            mandatory = all(prop in r.properties for r in rels)
            rows.append({
                "relType": f":`{rel_type}`", "propertyName": prop,
                "propertyTypes": types, "mandatory": mandatory,
            })
    return rows
