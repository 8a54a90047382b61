"""A small S-expression reader shared by the polynomial and formula grammars."""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int


def _positions(text: str):
    line, col = 1, 1
    for ch in text:
        yield ch, line, col
        if ch == "\n":
            line, col = line + 1, 1
        else:
            col += 1


def tokenize(text: str) -> list[tuple[str, int, int]]:
    tokens = []
    buf: list[str] = []
    start = (1, 1)
    in_comment = False
    for ch, line, col in _positions(text):
        if in_comment:
            if ch == "\n":
                in_comment = False
            continue
        if ch == ";" or ch in "()" or ch.isspace():
            if buf:
                tokens.append(("".join(buf), *start))
                buf = []
            if ch == ";":
                in_comment = True
            elif ch in "()":
                tokens.append((ch, line, col))
            continue
        if not buf:
            start = (line, col)
        buf.append(ch)
    if buf:
        tokens.append(("".join(buf), *start))
    return tokens


def read(text: str):
    """Read exactly one S-expression from ``text``."""
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty input", 1, 1)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        tok, line, col = tokens[pos]
        raise ParseError(f"unexpected trailing token {tok!r}", line, col)
    return node


def _read(tokens, pos):
    if pos >= len(tokens):
        last = tokens[-1]
        raise ParseError("unexpected end of input", last[1], last[2])
    tok, line, col = tokens[pos]
    if tok == ")":
        raise ParseError("unbalanced ')'", line, col)
    if tok != "(":
        return Atom(tok, line, col), pos + 1
    items = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise ParseError("unclosed '('", line, col)
        if tokens[pos][0] == ")":
            return SList(tuple(items), line, col), pos + 1
        item, pos = _read(tokens, pos)
        items.append(item)
