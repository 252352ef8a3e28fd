"""Pure extraction of checkable facts from Cypher text.

A small pattern parser over the token stream recognizes node patterns,
relationship patterns with direction, inline property maps, and a fixed set
of WHERE comparison shapes. Everything else is ignored: unknown constructs
yield no facts, so downstream checks pass vacuously instead of failing on
queries the parser does not understand. Relationship-type alternation
([:A|B]) and untyped relationships therefore produce no relationship facts;
variable-length patterns keep the type but wildcard both endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CypherSyntaxError
from .graphdb.lexer import EOF, FLOAT, IDENT, INT, PARAM, STRING, SYMBOL, Token, tokenize


@dataclass(frozen=True)
class RelPatternFact:
    source: Optional[str]  # None = wildcard endpoint
    name: str
    target: Optional[str]
    direction: str  # 'right', 'left', 'undirected'


@dataclass(frozen=True)
class CypherFacts:
    entity_literals: frozenset[str]
    relationship_patterns: frozenset[RelPatternFact]


@dataclass
class _NodeRef:
    var: Optional[str]
    label: Optional[str]


def extract_facts(cypher: str) -> CypherFacts:
    try:
        tokens = tokenize(cypher)
    except CypherSyntaxError:
        return CypherFacts(frozenset(), frozenset())
    scanner = _Scanner(tokens)
    scanner.scan()
    var_labels = scanner.var_labels
    patterns: set[RelPatternFact] = set()
    for left, rel, right in scanner.raw_rels:
        types, direction, var_length = rel
        if len(types) != 1:
            continue  # untyped or alternation: no checkable fact
        name = types[0]
        if var_length:
            patterns.add(RelPatternFact(None, name, None, direction))
            continue
        source = left.label or (var_labels.get(left.var) if left.var else None)
        target = right.label or (var_labels.get(right.var) if right.var else None)
        patterns.add(RelPatternFact(source, name, target, direction))
    return CypherFacts(frozenset(scanner.literals), frozenset(patterns))


class _Scanner:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.literals: set[str] = set()
        self.var_labels: dict[str, str] = {}
        self.raw_rels: list[tuple[_NodeRef, tuple, _NodeRef]] = []

    def peek(self, i: int, offset: int = 0) -> Token:
        return self.tokens[min(i + offset, len(self.tokens) - 1)]

    def scan(self) -> None:
        i = 0
        n = len(self.tokens)
        # first sweep: pattern chains (collects var->label and map literals)
        while i < n and self.tokens[i].kind != EOF:
            chain_end = self._try_chain(i)
            if chain_end is not None:
                i = chain_end
            else:
                i += 1
        # second sweep: WHERE-style comparisons against property accesses
        i = 0
        while i < n and self.tokens[i].kind != EOF:
            i = self._try_comparison(i)

    # --- pattern chains ---

    def _try_chain(self, i: int) -> Optional[int]:
        node = self._parse_node(i)
        if node is None:
            return None
        ref, j = node
        self._note_node(ref)
        found_rel = False
        while True:
            rel = self._parse_rel(j)
            if rel is None:
                break
            rel_info, j2 = rel
            nxt = self._parse_node(j2)
            if nxt is None:
                break
            ref2, j = nxt
            self._note_node(ref2)
            self.raw_rels.append((ref, rel_info, ref2))
            ref = ref2
            found_rel = True
        if not found_rel and ref.label is None and ref.var is None:
            return None  # bare parenthesized something; not a pattern
        return j

    def _note_node(self, ref: _NodeRef) -> None:
        if ref.var and ref.label and ref.var not in self.var_labels:
            self.var_labels[ref.var] = ref.label

    def _parse_node(self, i: int) -> Optional[tuple[_NodeRef, int]]:
        if not self._is_sym(i, "("):
            return None
        j = i + 1
        var = None
        label = None
        if self.peek(j).kind == IDENT:
            var = self.peek(j).text
            j += 1
        first = True
        while self._is_sym(j, ":"):
            if self.peek(j + 1).kind != IDENT:
                return None
            if first:
                label = self.peek(j + 1).text
                first = False
            j += 2
        if self._is_sym(j, "{"):
            end = self._parse_map(j)
            if end is None:
                return None
            j = end
        if not self._is_sym(j, ")"):
            return None
        return _NodeRef(var, label), j + 1

    def _parse_rel(self, i: int) -> Optional[tuple[tuple, int]]:
        j = i
        left_arrow = False
        if self._is_sym(j, "<"):
            left_arrow = True
            j += 1
        if not self._is_sym(j, "-"):
            return None
        j += 1
        types: list[str] = []
        var_length = False
        if self._is_sym(j, "["):
            j += 1
            if self.peek(j).kind == IDENT and not self._is_sym(j, ":"):
                j += 1  # relationship variable
            if self._is_sym(j, ":"):
                if self.peek(j + 1).kind != IDENT:
                    return None
                types.append(self.peek(j + 1).text)
                j += 2
                while self._is_sym(j, "|"):
                    j += 1
                    if self._is_sym(j, ":"):
                        j += 1
                    if self.peek(j).kind != IDENT:
                        return None
                    types.append(self.peek(j).text)
                    j += 1
            if self._is_sym(j, "*"):
                var_length = True
                j += 1
                if self.peek(j).kind == INT:
                    j += 1
                if self._is_sym(j, ".."):
                    j += 1
                    if self.peek(j).kind == INT:
                        j += 1
            if self._is_sym(j, "{"):
                end = self._parse_map(j)
                if end is None:
                    return None
                j = end
            if not self._is_sym(j, "]"):
                return None
            j += 1
        if not self._is_sym(j, "-"):
            return None
        j += 1
        right_arrow = False
        if self._is_sym(j, ">"):
            right_arrow = True
            j += 1
        if left_arrow and right_arrow:
            return None
        direction = "right" if right_arrow else "left" if left_arrow else "undirected"
        return (tuple(types), direction, var_length), j

    def _parse_map(self, i: int) -> Optional[int]:
        j = i + 1  # past '{'
        if self._is_sym(j, "}"):
            return j + 1
        while True:
            if self.peek(j).kind != IDENT or not self._is_sym(j + 1, ":"):
                return None
            j += 2
            j = self._skip_value(j)
            if j is None:
                return None
            if self._is_sym(j, ","):
                j += 1
                continue
            if self._is_sym(j, "}"):
                return j + 1
            return None

    def _skip_value(self, j: int) -> Optional[int]:
        tok = self.peek(j)
        if tok.kind == STRING:
            self.literals.add(tok.text)
            return j + 1
        if tok.kind in (INT, FLOAT, PARAM):
            return j + 1
        if tok.kind == IDENT:
            # true/false/null/date(...) and bare identifiers
            j += 1
            if self._is_sym(j, "("):
                depth = 1
                j += 1
                while depth and self.peek(j).kind != EOF:
                    if self._is_sym(j, "("):
                        depth += 1
                    elif self._is_sym(j, ")"):
                        depth -= 1
                    elif self.peek(j).kind == STRING:
                        pass  # function-call strings are not entity filters
                    j += 1
            return j
        if self._is_sym(j, "-") and self.peek(j + 1).kind in (INT, FLOAT):
            return j + 2
        if self._is_sym(j, "["):
            depth = 1
            j += 1
            while depth and self.peek(j).kind != EOF:
                if self._is_sym(j, "["):
                    depth += 1
                elif self._is_sym(j, "]"):
                    depth -= 1
                elif self.peek(j).kind == STRING:
                    self.literals.add(self.peek(j).text)
                j += 1
            return j
        return None

    # --- WHERE comparison shapes ---

    def _prop_access(self, i: int) -> Optional[int]:
        """IDENT ('.' IDENT)+ -> index after the access, else None."""
        if self.peek(i).kind != IDENT:
            return None
        j = i + 1
        steps = 0
        while self._is_sym(j, ".") and self.peek(j + 1).kind == IDENT:
            j += 2
            steps += 1
        return j if steps else None

    def _try_comparison(self, i: int) -> int:
        # STRING (=|<>) prop / STRING IN prop
        tok = self.peek(i)
        if tok.kind == STRING:
            j = i + 1
            if self._is_sym(j, "=", "<>"):
                end = self._prop_access(j + 1)
                if end is not None:
                    self.literals.add(tok.text)
                    return end
            if self.peek(j).kind == IDENT and self.peek(j).upper == "IN":
                end = self._prop_access(j + 1)
                if end is not None:
                    self.literals.add(tok.text)
                    return end
            return i + 1
        end = self._prop_access(i)
        if end is None:
            return i + 1
        j = end
        if self._is_sym(j, "=", "<>") and self.peek(j + 1).kind == STRING:
            self.literals.add(self.peek(j + 1).text)
            return j + 2
        if self.peek(j).kind == IDENT:
            word = self.peek(j).upper
            if word == "IN" and self._is_sym(j + 1, "["):
                k = j + 2
                while not self._is_sym(k, "]") and self.peek(k).kind != EOF:
                    if self.peek(k).kind == STRING:
                        self.literals.add(self.peek(k).text)
                    k += 1
                return k + 1
            if word in ("STARTS", "ENDS") and self.peek(j + 1).kind == IDENT \
                    and self.peek(j + 1).upper == "WITH" and self.peek(j + 2).kind == STRING:
                self.literals.add(self.peek(j + 2).text)
                return j + 3
            if word == "CONTAINS" and self.peek(j + 1).kind == STRING:
                self.literals.add(self.peek(j + 1).text)
                return j + 2
        return j

    def _is_sym(self, i: int, *texts: str) -> bool:
        tok = self.peek(i)
        return tok.kind == SYMBOL and tok.text in texts
