"""Minimal s-expression reader shared by the diagram and layout parsers.

Produces a nested structure of lists and atoms.  Atoms are:

* ``Quoted`` for ``"..."`` strings (escapes: ``\\"`` and ``\\\\``),
* ``Bracketed`` for ``[...]`` strings (escapes: ``\\]`` and ``\\\\``),
* plain ``str`` for bare symbols (``ltr``, ``+``, ``#t``, numbers, ...).

Every atom and list records the byte offset where it started, which parse
errors report.
"""

from __future__ import annotations

from dataclasses import dataclass


class SexprError(Exception):
    """Malformed s-expression input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Quoted:
    text: str
    offset: int = 0


@dataclass(frozen=True)
class Bracketed:
    text: str
    offset: int = 0


@dataclass(frozen=True)
class Symbol:
    text: str
    offset: int = 0


@dataclass(frozen=True)
class Node:
    items: tuple
    offset: int = 0


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _read_delimited(text: str, i: int, close: str) -> tuple[str, int]:
    # i points just past the opening delimiter
    start = i
    out = []
    while i < len(text):
        c = text[i]
        if c == "\\":
            if i + 1 >= len(text):
                raise SexprError("dangling escape", _byte_offset(text, i))
            nxt = text[i + 1]
            if nxt in (close, "\\", '"', "]"):
                out.append(nxt)
                i += 2
                continue
            raise SexprError(f"unknown escape \\{nxt}", _byte_offset(text, i))
        if c == close:
            return "".join(out), i + 1
        out.append(c)
        i += 1
    raise SexprError(f"unterminated {close!r}-delimited atom", _byte_offset(text, start - 1))


_SYMBOL_END = set(' \t\r\n()[]"')


def tokenize(text: str):
    """Yield (atom-or-paren, byte offset) pairs."""
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        off = _byte_offset(text, i)
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in "()":
            yield c, off
            i += 1
        elif c == '"':
            body, i = _read_delimited(text, i + 1, '"')
            yield Quoted(body, off), off
        elif c == "[":
            body, i = _read_delimited(text, i + 1, "]")
            yield Bracketed(body, off), off
        elif c == "]":
            raise SexprError("unbalanced ']'", off)
        else:
            j = i
            while j < n and text[j] not in _SYMBOL_END:
                j += 1
            yield Symbol(text[i:j], off), off
            i = j


def parse(text: str):
    """Parse a single s-expression; trailing non-whitespace is an error."""
    items = parse_many(text)
    if len(items) != 1:
        off = 0 if not items else getattr(items[1], "offset", 0) if len(items) > 1 else 0
        raise SexprError(f"expected exactly one expression, found {len(items)}", off)
    return items[0]


def parse_many(text: str):
    """Parse a whitespace-separated series of s-expressions."""
    stack: list[list] = []
    offsets: list[int] = []
    top: list = []
    for tok, off in tokenize(text):
        if tok == "(":
            stack.append(top)
            offsets.append(off)
            top = []
        elif tok == ")":
            if not stack:
                raise SexprError("unbalanced ')'", off)
            node = Node(tuple(top), offsets.pop())
            top = stack.pop()
            top.append(node)
        else:
            top.append(tok)
    if stack:
        raise SexprError("unbalanced '('", offsets[-1])
    return top


def escape(body: str, close: str) -> str:
    return body.replace("\\", "\\\\").replace(close, "\\" + close)


def format_number(value: float) -> str:
    """Stable numeric formatting: integers without a trailing ``.0``."""
    if isinstance(value, bool):
        raise TypeError("bool is not a layout number")
    if float(value) == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))
