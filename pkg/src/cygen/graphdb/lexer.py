"""Tokenizer for the embedded Cypher engine.

Keywords are not distinguished at the lexer level: Cypher keywords are
case-insensitive identifiers, so the parser matches token text upper-cased.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import CypherSyntaxError

IDENT = "IDENT"
INT = "INT"
FLOAT = "FLOAT"
STRING = "STRING"
SYMBOL = "SYMBOL"
PARAM = "PARAM"
EOF = "EOF"

_SYMBOLS = (
    "<=", ">=", "<>", "..", "=~", "+", "-", "*", "/", "%", "^",
    "(", ")", "[", "]", "{", "}", ",", ":", ";", ".", "=", "<", ">", "|",
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "`": "`", "b": "\b", "f": "\f"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i)
            if j < 0:
                raise CypherSyntaxError(f"unterminated block comment at {i}")
            i = j + 2
            continue
        if ch in "'\"":
            value, i = _string(text, i, ch)
            tokens.append(Token(STRING, value, i))
            continue
        if ch == "`":
            j = text.find("`", i + 1)
            if j < 0:
                raise CypherSyntaxError(f"unterminated backtick identifier at {i}")
            tokens.append(Token(IDENT, text[i + 1 : j], i))
            i = j + 1
            continue
        if ch == "$":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 1:
                raise CypherSyntaxError(f"empty parameter name at {i}")
            tokens.append(Token(PARAM, text[i + 1 : j], i))
            i = j
            continue
        if ch.isdigit():
            tok, i = _number(text, i)
            tokens.append(tok)
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token(IDENT, text[i:j], i))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(SYMBOL, sym, i))
                i += len(sym)
                break
        else:
            raise CypherSyntaxError(f"unexpected character {ch!r} at {i}")
    tokens.append(Token(EOF, "", n))
    return tokens


def _string(text: str, i: int, quote: str) -> tuple[str, int]:
    out: list[str] = []
    j = i + 1
    n = len(text)
    while j < n:
        ch = text[j]
        if ch == "\\":
            if j + 1 >= n:
                break
            esc = text[j + 1]
            if esc == "u" and j + 5 < n:
                out.append(chr(int(text[j + 2 : j + 6], 16)))
                j += 6
                continue
            out.append(_ESCAPES.get(esc, esc))
            j += 2
            continue
        if ch == quote:
            return "".join(out), j + 1
        out.append(ch)
        j += 1
    raise CypherSyntaxError(f"unterminated string literal at {i}")


def _number(text: str, i: int) -> tuple[Token, int]:
    n = len(text)
    j = i
    while j < n and text[j].isdigit():
        j += 1
    is_float = False
    # a '.' starts a fraction only when followed by a digit; '..' is a range
    if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
        is_float = True
        j += 1
        while j < n and text[j].isdigit():
            j += 1
    if j < n and text[j] in "eE":
        k = j + 1
        if k < n and text[k] in "+-":
            k += 1
        if k < n and text[k].isdigit():
            is_float = True
            j = k
            while j < n and text[j].isdigit():
                j += 1
    kind = FLOAT if is_float else INT
    return Token(kind, text[i:j], i), j
