"""Recursive-descent parser for the embedded Cypher engine's read-only subset.

Supported: MATCH / OPTIONAL MATCH (incl. shortestPath and variable-length
relationships), WHERE, WITH, RETURN, UNWIND, UNION [ALL], CALL of whitelisted
db.* introspection procedures, EXISTS{...} / COUNT{...} pattern subqueries,
CASE, and the usual expression grammar. Write clauses raise
UnsupportedCypherError so a read-only session can never mutate the graph.
"""

from __future__ import annotations

from typing import Optional

from ..errors import CypherSyntaxError, UnsupportedCypherError
from . import ast
from .lexer import EOF, FLOAT, IDENT, INT, PARAM, STRING, SYMBOL, Token, tokenize

_WRITE_KEYWORDS = {
    "CREATE", "MERGE", "DELETE", "DETACH", "SET", "REMOVE", "FOREACH",
    "DROP", "LOAD", "USING",
}

_CLAUSE_STARTERS = {
    "MATCH", "OPTIONAL", "WITH", "RETURN", "UNWIND", "CALL", "UNION", "WHERE",
} | _WRITE_KEYWORDS


def parse(text: str) -> ast.Query:
    return _Parser(tokenize(text)).parse_query()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    # --- token helpers ---

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != EOF:
            self.i += 1
        return tok

    def at_kw(self, *words: str) -> bool:
        return self.peek().kind == IDENT and self.peek().upper in words

    def eat_kw(self, *words: str) -> bool:
        if self.at_kw(*words):
            self.next()
            return True
        return False

    def expect_kw(self, word: str) -> None:
        if not self.eat_kw(word):
            raise CypherSyntaxError(f"expected {word} at {self.peek().pos}, found {self.peek().text!r}")

    def at_sym(self, *syms: str) -> bool:
        return self.peek().kind == SYMBOL and self.peek().text in syms

    def eat_sym(self, *syms: str) -> bool:
        if self.at_sym(*syms):
            self.next()
            return True
        return False

    def expect_sym(self, sym: str) -> None:
        if not self.eat_sym(sym):
            raise CypherSyntaxError(f"expected {sym!r} at {self.peek().pos}, found {self.peek().text!r}")

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind != IDENT:
            raise CypherSyntaxError(f"expected identifier at {tok.pos}, found {tok.text!r}")
        return self.next().text

    # --- query structure ---

    def parse_query(self) -> ast.Query:
        parts = [self.parse_single_query()]
        union_all: list[bool] = []
        while self.at_kw("UNION"):
            self.next()
            union_all.append(self.eat_kw("ALL"))
            parts.append(self.parse_single_query())
        if self.eat_sym(";"):
            pass
        if self.peek().kind != EOF:
            raise CypherSyntaxError(
                f"unexpected trailing input at {self.peek().pos}: {self.peek().text!r}"
            )
        return ast.Query(tuple(parts), tuple(union_all))

    def parse_single_query(self) -> ast.SingleQuery:
        clauses: list[ast.Clause] = []
        while True:
            tok = self.peek()
            if tok.kind == EOF or self.at_kw("UNION") or self.at_sym(";"):
                break
            if tok.kind != IDENT:
                raise CypherSyntaxError(f"expected a clause at {tok.pos}, found {tok.text!r}")
            word = tok.upper
            if word in _WRITE_KEYWORDS:
                raise UnsupportedCypherError(f"{word} is not supported in a read-only session")
            if word == "OPTIONAL":
                self.next()
                self.expect_kw("MATCH")
                clauses.append(self.parse_match(optional=True))
            elif word == "MATCH":
                self.next()
                clauses.append(self.parse_match(optional=False))
            elif word == "UNWIND":
                self.next()
                expr = self.parse_expr()
                self.expect_kw("AS")
                clauses.append(ast.Unwind(expr, self.expect_ident()))
            elif word == "WITH":
                self.next()
                clauses.append(self.parse_projection("with"))
            elif word == "RETURN":
                self.next()
                clauses.append(self.parse_projection("return"))
            elif word == "CALL":
                self.next()
                clauses.append(self.parse_call())
            else:
                raise CypherSyntaxError(f"unknown clause {tok.text!r} at {tok.pos}")
        if not clauses:
            raise CypherSyntaxError("empty query")
        return ast.SingleQuery(tuple(clauses))

    def parse_match(self, optional: bool) -> ast.Match:
        patterns = [self.parse_pattern_part()]
        while self.eat_sym(","):
            patterns.append(self.parse_pattern_part())
        where = None
        if self.eat_kw("WHERE"):
            where = self.parse_expr()
        return ast.Match(tuple(patterns), optional, where)

    def parse_call(self) -> ast.CallProc:
        name = self.expect_ident()
        while self.eat_sym("."):
            name += "." + self.expect_ident()
        args: list[ast.Expr] = []
        if self.eat_sym("("):
            if not self.at_sym(")"):
                args.append(self.parse_expr())
                while self.eat_sym(","):
                    args.append(self.parse_expr())
            self.expect_sym(")")
        yields: list[str] = []
        if self.eat_kw("YIELD"):
            yields.append(self.expect_ident())
            while self.eat_sym(","):
                yields.append(self.expect_ident())
        return ast.CallProc(name, tuple(args), tuple(yields))

    def parse_projection(self, kind: str) -> ast.Projection:
        distinct = self.eat_kw("DISTINCT")
        star = False
        items: list[ast.ReturnItem] = []
        if self.at_sym("*"):
            self.next()
            star = True
            while self.eat_sym(","):
                items.append(self.parse_return_item())
        else:
            items.append(self.parse_return_item())
            while self.eat_sym(","):
                items.append(self.parse_return_item())
        order: list[ast.OrderItem] = []
        if self.at_kw("ORDER"):
            self.next()
            self.expect_kw("BY")
            order.append(self.parse_order_item())
            while self.eat_sym(","):
                order.append(self.parse_order_item())
        skip = None
        if self.eat_kw("SKIP"):
            skip = self.parse_expr()
        limit = None
        if self.eat_kw("LIMIT"):
            limit = self.parse_expr()
        where = None
        if kind == "with" and self.eat_kw("WHERE"):
            where = self.parse_expr()
        return ast.Projection(kind, tuple(items), star, distinct, tuple(order), skip, limit, where)

    def parse_return_item(self) -> ast.ReturnItem:
        expr = self.parse_expr()
        alias = None
        if self.eat_kw("AS"):
            alias = self.expect_ident()
        return ast.ReturnItem(expr, alias)

    def parse_order_item(self) -> ast.OrderItem:
        expr = self.parse_expr()
        descending = False
        if self.at_kw("ASC", "ASCENDING"):
            self.next()
        elif self.at_kw("DESC", "DESCENDING"):
            self.next()
            descending = True
        return ast.OrderItem(expr, descending)

    # --- patterns ---

    def parse_pattern_part(self) -> ast.PatternPart:
        var = None
        if self.peek().kind == IDENT and self.peek(1).kind == SYMBOL and self.peek(1).text == "=" \
                and self.peek().upper not in _CLAUSE_STARTERS:
            var = self.next().text
            self.next()  # '='
        shortest = None
        if self.at_kw("SHORTESTPATH", "ALLSHORTESTPATHS"):
            shortest = "allShortestPaths" if self.peek().upper == "ALLSHORTESTPATHS" else "shortestPath"
            self.next()
            self.expect_sym("(")
            part = self.parse_pattern_chain()
            self.expect_sym(")")
            return ast.PatternPart(var, part, shortest)
        return ast.PatternPart(var, self.parse_pattern_chain(), None)

    def parse_pattern_chain(self) -> tuple:
        elements: list = [self.parse_node_pattern()]
        while self.at_sym("-", "<") and self._looks_like_rel():
            rel = self.parse_rel_pattern()
            node = self.parse_node_pattern()
            elements.extend([rel, node])
        return tuple(elements)

    def _looks_like_rel(self) -> bool:
        # '-' or '<' begins a relationship pattern when followed by '-', '[' or '('
        tok, nxt = self.peek(), self.peek(1)
        if tok.text == "<":
            return nxt.kind == SYMBOL and nxt.text == "-"
        if tok.text == "-":
            return nxt.kind == SYMBOL and nxt.text in ("[", "(", "-") or nxt.text == ">"
        return False

    def parse_node_pattern(self) -> ast.NodePat:
        self.expect_sym("(")
        var = None
        if self.peek().kind == IDENT and not self.at_sym(":"):
            var = self.next().text
        labels: list[str] = []
        while self.eat_sym(":"):
            labels.append(self.expect_ident())
        props = None
        if self.at_sym("{"):
            props = self.parse_map_literal()
        self.expect_sym(")")
        return ast.NodePat(var, tuple(labels), props)

    def parse_rel_pattern(self) -> ast.RelPat:
        left_arrow = self.eat_sym("<")
        self.expect_sym("-")
        var = None
        types: list[str] = []
        props = None
        var_length = False
        min_hops, max_hops = 1, 1
        if self.eat_sym("["):
            if self.peek().kind == IDENT and not self.at_sym(":"):
                var = self.next().text
            if self.eat_sym(":"):
                types.append(self.expect_ident())
                while self.eat_sym("|"):
                    self.eat_sym(":")  # legacy '|:TYPE' alternation
                    types.append(self.expect_ident())
            if self.eat_sym("*"):
                var_length = True
                min_hops, max_hops = 1, None
                if self.peek().kind == INT:
                    min_hops = int(self.next().text)
                    max_hops = min_hops
                if self.eat_sym(".."):
                    max_hops = None
                    if self.peek().kind == INT:
                        max_hops = int(self.next().text)
            if self.at_sym("{"):
                props = self.parse_map_literal()
            self.expect_sym("]")
        self.expect_sym("-")
        right_arrow = self.eat_sym(">")
        if left_arrow and right_arrow:
            raise CypherSyntaxError("relationship pattern cannot point both ways")
        direction = "right" if right_arrow else "left" if left_arrow else "undirected"
        return ast.RelPat(var, tuple(types), direction, props, var_length, min_hops, max_hops)

    def parse_map_literal(self) -> ast.MapLit:
        self.expect_sym("{")
        items: list[tuple[str, ast.Expr]] = []
        if not self.at_sym("}"):
            while True:
                key = self.expect_ident()
                self.expect_sym(":")
                items.append((key, self.parse_expr()))
                if not self.eat_sym(","):
                    break
        self.expect_sym("}")
        return ast.MapLit(tuple(items))

    # --- expressions (precedence climbing) ---

    def parse_expr(self) -> ast.Expr:
        return self.parse_or()

    def parse_or(self) -> ast.Expr:
        left = self.parse_xor()
        while self.at_kw("OR"):
            self.next()
            left = ast.Binary("OR", left, self.parse_xor())
        return left

    def parse_xor(self) -> ast.Expr:
        left = self.parse_and()
        while self.at_kw("XOR"):
            self.next()
            left = ast.Binary("XOR", left, self.parse_and())
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_not()
        while self.at_kw("AND"):
            self.next()
            left = ast.Binary("AND", left, self.parse_not())
        return left

    def parse_not(self) -> ast.Expr:
        if self.at_kw("NOT"):
            self.next()
            return ast.Unary("NOT", self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self) -> ast.Expr:
        left = self.parse_predicated()
        chain: list[tuple[str, ast.Expr]] = []
        while self.at_sym("=", "<>", "<", ">", "<=", ">="):
            op = self.next().text
            chain.append((op, self.parse_predicated()))
        if not chain:
            return left
        return ast.CmpChain(left, tuple(chain))

    def parse_predicated(self) -> ast.Expr:
        expr = self.parse_add_sub()
        while True:
            if self.at_kw("IS"):
                self.next()
                if self.eat_kw("NOT"):
                    self.expect_kw("NULL")
                    expr = ast.Predicate("IS NOT NULL", expr)
                else:
                    self.expect_kw("NULL")
                    expr = ast.Predicate("IS NULL", expr)
            elif self.at_kw("IN"):
                self.next()
                expr = ast.Predicate("IN", expr, self.parse_add_sub())
            elif self.at_kw("STARTS"):
                self.next()
                self.expect_kw("WITH")
                expr = ast.Predicate("STARTS WITH", expr, self.parse_add_sub())
            elif self.at_kw("ENDS"):
                self.next()
                self.expect_kw("WITH")
                expr = ast.Predicate("ENDS WITH", expr, self.parse_add_sub())
            elif self.at_kw("CONTAINS"):
                self.next()
                expr = ast.Predicate("CONTAINS", expr, self.parse_add_sub())
            elif self.at_sym("=~"):
                self.next()
                expr = ast.Binary("=~", expr, self.parse_add_sub())
            else:
                return expr

    def parse_add_sub(self) -> ast.Expr:
        left = self.parse_mul_div()
        while self.at_sym("+", "-"):
            op = self.next().text
            left = ast.Binary(op, left, self.parse_mul_div())
        return left

    def parse_mul_div(self) -> ast.Expr:
        left = self.parse_power()
        while self.at_sym("*", "/", "%"):
            op = self.next().text
            left = ast.Binary(op, left, self.parse_power())
        return left

    def parse_power(self) -> ast.Expr:
        left = self.parse_unary()
        if self.at_sym("^"):
            self.next()
            return ast.Binary("^", left, self.parse_power())
        return left

    def parse_unary(self) -> ast.Expr:
        if self.at_sym("-"):
            self.next()
            return ast.Unary("-", self.parse_unary())
        if self.at_sym("+"):
            self.next()
            return ast.Unary("+", self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_atom()
        while True:
            if self.at_sym("."):
                self.next()
                expr = ast.Prop(expr, self.expect_ident())
            elif self.at_sym("["):
                self.next()
                lo: Optional[ast.Expr] = None
                if not self.at_sym(".."):
                    lo = self.parse_expr()
                if self.eat_sym(".."):
                    hi = None if self.at_sym("]") else self.parse_expr()
                    expr = ast.Slice(expr, lo, hi)
                else:
                    assert lo is not None
                    expr = ast.Index(expr, lo)
                self.expect_sym("]")
            else:
                return expr

    def parse_atom(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == INT:
            self.next()
            return ast.Lit(int(tok.text))
        if tok.kind == FLOAT:
            self.next()
            return ast.Lit(float(tok.text))
        if tok.kind == STRING:
            self.next()
            return ast.Lit(tok.text)
        if tok.kind == PARAM:
            self.next()
            return ast.Param(tok.text)
        if tok.kind == SYMBOL:
            if tok.text == "(":
                self.next()
                expr = self.parse_expr()
                self.expect_sym(")")
                return expr
            if tok.text == "[":
                self.next()
                items: list[ast.Expr] = []
                if not self.at_sym("]"):
                    items.append(self.parse_expr())
                    while self.eat_sym(","):
                        items.append(self.parse_expr())
                self.expect_sym("]")
                return ast.ListLit(tuple(items))
            if tok.text == "{":
                return self.parse_map_literal()
        if tok.kind == IDENT:
            word = tok.upper
            if word == "NULL":
                self.next()
                return ast.Lit(None)
            if word == "TRUE":
                self.next()
                return ast.Lit(True)
            if word == "FALSE":
                self.next()
                return ast.Lit(False)
            if word == "CASE":
                return self.parse_case()
            if word in ("EXISTS", "COUNT") and self.peek(1).kind == SYMBOL and self.peek(1).text == "{":
                return self.parse_pattern_subquery(word)
            if word == "COUNT" and self.peek(1).kind == SYMBOL and self.peek(1).text == "(" \
                    and self.peek(2).kind == SYMBOL and self.peek(2).text == "*":
                self.next()
                self.next()
                self.next()
                self.expect_sym(")")
                return ast.CountStar()
            # function call: ident('.' ident)* '('
            if self._is_function_call():
                return self.parse_function_call()
            self.next()
            return ast.Var(tok.text)
        raise CypherSyntaxError(f"unexpected token {tok.text!r} at {tok.pos}")

    def _is_function_call(self) -> bool:
        j = 0
        while True:
            if self.peek(j).kind != IDENT:
                return False
            j += 1
            nxt = self.peek(j)
            if nxt.kind == SYMBOL and nxt.text == "(":
                return True
            if nxt.kind == SYMBOL and nxt.text == "." and self.peek(j + 1).kind == IDENT \
                    and self.peek(j + 2).kind == SYMBOL and self.peek(j + 2).text in (".", "("):
                j += 1
                continue
            return False

    def parse_function_call(self) -> ast.Expr:
        name = self.expect_ident()
        while self.at_sym(".") and self.peek(1).kind == IDENT:
            self.next()
            name += "." + self.expect_ident()
        self.expect_sym("(")
        distinct = self.eat_kw("DISTINCT")
        args: list[ast.Expr] = []
        if not self.at_sym(")"):
            args.append(self.parse_expr())
            while self.eat_sym(","):
                args.append(self.parse_expr())
        self.expect_sym(")")
        return ast.FuncCall(name.lower(), tuple(args), distinct)

    def parse_case(self) -> ast.Expr:
        self.expect_kw("CASE")
        subject = None
        if not self.at_kw("WHEN"):
            subject = self.parse_expr()
        whens: list[tuple[ast.Expr, ast.Expr]] = []
        while self.eat_kw("WHEN"):
            cond = self.parse_expr()
            self.expect_kw("THEN")
            whens.append((cond, self.parse_expr()))
        if not whens:
            raise CypherSyntaxError("CASE requires at least one WHEN branch")
        default = None
        if self.eat_kw("ELSE"):
            default = self.parse_expr()
        self.expect_kw("END")
        return ast.CaseExpr(subject, tuple(whens), default)

    def parse_pattern_subquery(self, word: str) -> ast.Expr:
        self.next()  # EXISTS / COUNT
        self.expect_sym("{")
        self.eat_kw("MATCH")
        pattern = self.parse_pattern_part()
        where = None
        if self.eat_kw("WHERE"):
            where = self.parse_expr()
        self.expect_sym("}")
        cls = ast.ExistsSub if word == "EXISTS" else ast.CountSub
        return cls(pattern, where)
