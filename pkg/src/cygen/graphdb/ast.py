"""AST node definitions for the embedded Cypher engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

# --- expressions ---------------------------------------------------------------


class Expr:
    pass


@dataclass(frozen=True)
class Lit(Expr):
    value: Any


@dataclass(frozen=True)
class ListLit(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class MapLit(Expr):
    items: tuple[tuple[str, Expr], ...]


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Prop(Expr):
    target: Expr
    key: str


@dataclass(frozen=True)
class Index(Expr):
    target: Expr
    index: Expr


@dataclass(frozen=True)
class Slice(Expr):
    target: Expr
    lo: Optional[Expr]
    hi: Optional[Expr]


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # '-', '+', 'NOT'
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # '+', '-', '*', '/', '%', '^', 'AND', 'OR', 'XOR', '=~'
    left: Expr
    right: Expr


@dataclass(frozen=True)
class CmpChain(Expr):
    """Chained comparison, e.g. 1 < x <= 5."""

    first: Expr
    rest: tuple[tuple[str, Expr], ...]  # (op, operand)


@dataclass(frozen=True)
class Predicate(Expr):
    """IS NULL / IS NOT NULL / IN / STARTS WITH / ENDS WITH / CONTAINS."""

    op: str
    target: Expr
    operand: Optional[Expr] = None


@dataclass(frozen=True)
class FuncCall(Expr):
    name: str  # lower-cased, dotted for namespaced functions
    args: tuple[Expr, ...]
    distinct: bool = False


@dataclass(frozen=True)
class CountStar(Expr):
    pass


@dataclass(frozen=True)
class CaseExpr(Expr):
    subject: Optional[Expr]
    whens: tuple[tuple[Expr, Expr], ...]
    default: Optional[Expr]


@dataclass(frozen=True)
class ExistsSub(Expr):
    pattern: "PatternPart"
    where: Optional[Expr]


@dataclass(frozen=True)
class CountSub(Expr):
    pattern: "PatternPart"
    where: Optional[Expr]


# --- patterns ------------------------------------------------------------------


@dataclass(frozen=True)
class NodePat:
    var: Optional[str]
    labels: tuple[str, ...]
    props: Optional[MapLit]


@dataclass(frozen=True)
class RelPat:
    var: Optional[str]
    types: tuple[str, ...]
    direction: str  # 'right', 'left', 'undirected'
    props: Optional[MapLit]
    var_length: bool = False
    min_hops: int = 1
    max_hops: Optional[int] = None


@dataclass(frozen=True)
class PatternPart:
    """Alternating chain: elements[0] is a NodePat, then RelPat/NodePat pairs."""

    var: Optional[str]
    elements: tuple[Any, ...]
    shortest: Optional[str] = None  # None | 'shortestPath' | 'allShortestPaths'


# --- clauses -------------------------------------------------------------------


class Clause:
    pass


@dataclass(frozen=True)
class Match(Clause):
    patterns: tuple[PatternPart, ...]
    optional: bool
    where: Optional[Expr]


@dataclass(frozen=True)
class Unwind(Clause):
    expr: Expr
    var: str


@dataclass(frozen=True)
class OrderItem:
    expr: Expr
    descending: bool


@dataclass(frozen=True)
class ReturnItem:
    expr: Expr
    alias: Optional[str]


@dataclass(frozen=True)
class Projection(Clause):
    """Shared body of WITH and RETURN."""

    kind: str  # 'with' or 'return'
    items: tuple[ReturnItem, ...]
    star: bool
    distinct: bool
    order: tuple[OrderItem, ...]
    skip: Optional[Expr]
    limit: Optional[Expr]
    where: Optional[Expr]  # WITH only


@dataclass(frozen=True)
class CallProc(Clause):
    name: str
    args: tuple[Expr, ...]
    yields: tuple[str, ...]  # empty means all columns


@dataclass(frozen=True)
class SingleQuery:
    clauses: tuple[Clause, ...]


@dataclass(frozen=True)
class Query:
    parts: tuple[SingleQuery, ...]
    union_all: tuple[bool, ...] = field(default=())  # one flag per UNION joint
