"""Regular-expression and BNF frontends for the diagram language.

Regex syntax: literals are bare tokens or quoted strings, ``|`` for union,
postfix ``*``, juxtaposition for concatenation, ``()`` for grouping, ``0``
for the empty language, ``eps`` for the empty string.

BNF syntax: one rule per ``name := alt | alt`` group, ``<name>`` for rule
references, whitespace-separated atoms, and a leading ``|`` (or an empty
right-hand side) for an empty alternative.  Continuation lines start with
``|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .diagram import Diagram, NonTerminal, Polarity, Sequence, Stack, Terminal


class FrontendError(Exception):
    pass


class RegexSyntaxError(FrontendError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class BnfSyntaxError(FrontendError):
    pass


class EmptyLanguageError(FrontendError):
    """The regex denotes the empty language and has no diagram."""


# --- regular expressions ----------------------------------------------------


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Literal:
    symbol: str


@dataclass(frozen=True)
class Concat:
    left: "Regex"
    right: "Regex"


@dataclass(frozen=True)
class Union_:
    left: "Regex"
    right: "Regex"


@dataclass(frozen=True)
class Star:
    inner: "Regex"


Regex = Union[Empty, Epsilon, Literal, Concat, Union_, Star]

EMPTY = Empty()
EPSILON_RE = Epsilon()

_REGEX_SPECIAL = set('|*()" \t\r\n')


def _tokenize_regex(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c in "|*()":
            tokens.append(("op", c, i))
            i += 1
        elif c == '"':
            j = i + 1
            out = []
            while j < len(text) and text[j] != '"':
                if text[j] == "\\" and j + 1 < len(text):
                    out.append(text[j + 1])
                    j += 2
                else:
                    out.append(text[j])
                    j += 1
            if j >= len(text):
                raise RegexSyntaxError("unterminated quoted literal", i)
            tokens.append(("lit", "".join(out), i))
            i = j + 1
        else:
            j = i
            while j < len(text) and text[j] not in _REGEX_SPECIAL:
                j += 1
            word = text[i:j]
            if word == "0":
                tokens.append(("empty", word, i))
            elif word == "eps":
                tokens.append(("eps", word, i))
            else:
                tokens.append(("lit", word, i))
            i = j
    return tokens


def parse_regex(text: str) -> Regex:
    """Parse with precedence star > concatenation > union."""
    tokens = _tokenize_regex(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", "", len(text))

    def union() -> Regex:
        parts = [concat()]
        while peek()[:2] == ("op", "|"):
            nonlocal pos
            pos += 1
            parts.append(concat())
        result = parts[-1]
        for part in reversed(parts[:-1]):
            result = Union_(part, result)
        return result

    def concat() -> Regex:
        parts = [starred()]
        while peek()[0] in ("lit", "empty", "eps") or peek()[:2] == ("op", "("):
            parts.append(starred())
        result = parts[-1]
        for part in reversed(parts[:-1]):
            result = Concat(part, result)
        return result

    def starred() -> Regex:
        nonlocal pos
        r = atom()
        while peek()[:2] == ("op", "*"):
            pos += 1
            r = Star(r)
        return r

    def atom() -> Regex:
        nonlocal pos
        kind, value, off = peek()
        if kind == "lit":
            pos += 1
            return Literal(value)
        if kind == "empty":
            pos += 1
            return EMPTY
        if kind == "eps":
            pos += 1
            return EPSILON_RE
        if (kind, value) == ("op", "("):
            pos += 1
            inner = union()
            if peek()[:2] != ("op", ")"):
                raise RegexSyntaxError("expected ')'", peek()[2])
            pos += 1
            return inner
        raise RegexSyntaxError(f"unexpected {value!r}" if value else "unexpected end of input", off)

    if not tokens:
        raise RegexSyntaxError("empty regular expression source", 0)
    result = union()
    if pos != len(tokens):
        raise RegexSyntaxError(f"unexpected {tokens[pos][1]!r}", tokens[pos][2])
    return result


def print_regex(r: Regex) -> str:
    def quote(sym: str) -> str:
        if sym in ("0", "eps") or any(c in _REGEX_SPECIAL for c in sym) or not sym:
            return '"%s"' % sym.replace("\\", "\\\\").replace('"', '\\"')
        return sym

    def go(r: Regex, prec: int) -> str:
        if isinstance(r, Empty):
            return "0"
        if isinstance(r, Epsilon):
            return "eps"
        if isinstance(r, Literal):
            return quote(r.symbol)
        if isinstance(r, Star):
            return go(r.inner, 3) + "*"
        if isinstance(r, Concat):
            s = f"{go(r.left, 2)} {go(r.right, 1)}"
            return f"({s})" if prec > 1 else s
        if isinstance(r, Union_):
            s = f"{go(r.left, 1)} | {go(r.right, 0)}"
            return f"({s})" if prec > 0 else s
        raise TypeError(f"not a regex: {r!r}")

    return go(r, 0)


def eliminate_empty(r: Regex) -> Regex:
    """Rewrite away the empty language: r.0 = 0, r|0 = r, 0* = eps.

    Applied bottom-up to a fixpoint.  The result either contains no Empty
    subterm or is Empty itself, meaning the whole language is empty.
    """
    if isinstance(r, Concat):
        left = eliminate_empty(r.left)
        right = eliminate_empty(r.right)
        if isinstance(left, Empty) or isinstance(right, Empty):
            return EMPTY
        return Concat(left, right)
    if isinstance(r, Union_):
        left = eliminate_empty(r.left)
        right = eliminate_empty(r.right)
        if isinstance(left, Empty):
            return right
        if isinstance(right, Empty):
            return left
        return Union_(left, right)
    if isinstance(r, Star):
        inner = eliminate_empty(r.inner)
        if isinstance(inner, Empty):
            return EPSILON_RE
        return Star(inner)
    return r


def regex_to_diagram(r: Regex) -> Diagram:
    """The literal recursive translation; expects eliminate_empty was applied."""
    if isinstance(r, Empty):
        raise EmptyLanguageError("the empty language has no diagram")
    if isinstance(r, Epsilon):
        return Sequence(())
    if isinstance(r, Literal):
        return Terminal(r.symbol)
    if isinstance(r, Concat):
        return Sequence((regex_to_diagram(r.left), regex_to_diagram(r.right)))
    if isinstance(r, Union_):
        return Stack(Polarity.POSITIVE, regex_to_diagram(r.left), regex_to_diagram(r.right))
    if isinstance(r, Star):
        return Stack(Polarity.NEGATIVE, Sequence(()), regex_to_diagram(r.inner))
    raise TypeError(f"not a regex: {r!r}")


# --- Backus-Naur form -------------------------------------------------------


@dataclass(frozen=True)
class TerminalAtom:
    text: str


@dataclass(frozen=True)
class RuleRef:
    name: str


BnfAtom = Union[TerminalAtom, RuleRef]


@dataclass(frozen=True)
class BnfRule:
    name: str
    alternatives: tuple[tuple[BnfAtom, ...], ...]


@dataclass(frozen=True)
class BnfGrammar:
    rules: tuple[BnfRule, ...]

    def rule(self, name: str) -> BnfRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


def _parse_atom(token: str) -> BnfAtom:
    if token.startswith("<") and token.endswith(">") and len(token) > 2:
        return RuleRef(token[1:-1])
    return TerminalAtom(token)


def parse_bnf(text: str) -> BnfGrammar:
    chunks: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if ":=" in stripped:
            name, _, rhs = stripped.partition(":=")
            name = name.strip()
            if not name or " " in name:
                raise BnfSyntaxError(f"line {lineno}: bad rule name {name!r}")
            chunks.append((name, rhs.strip()))
        elif stripped.startswith("|"):
            if not chunks:
                raise BnfSyntaxError(f"line {lineno}: alternative before any rule")
            name, rhs = chunks[-1]
            chunks[-1] = (name, rhs + " | " + stripped[1:].strip())
        else:
            raise BnfSyntaxError(f"line {lineno}: expected 'name := ...' or '| ...'")

    rules = []
    seen = set()
    for name, rhs in chunks:
        if name in seen:
            raise BnfSyntaxError(f"duplicate rule name {name!r}")
        seen.add(name)
        segments = rhs.split("|")
        alternatives: list[tuple[BnfAtom, ...]] = []
        for i, segment in enumerate(segments):
            atoms = segment.split()
            if not atoms:
                if i == 0:
                    # An empty right-hand side, or a leading '|': the empty
                    # alternative.  An empty segment elsewhere is a typo.
                    alternatives.append(())
                    continue
                raise BnfSyntaxError(f"rule {name!r}: empty alternative after '|'")
            alternatives.append(tuple(_parse_atom(a) for a in atoms))
        if alternatives == [()] and rhs.strip() == "|":
            raise BnfSyntaxError(f"rule {name!r}: dangling '|'")
        rules.append(BnfRule(name, tuple(alternatives)))
    return BnfGrammar(tuple(rules))


def _atom_to_diagram(atom: BnfAtom) -> Diagram:
    if isinstance(atom, RuleRef):
        return NonTerminal(atom.name)
    return Terminal(atom.text)


def _alternative_to_diagram(alt: tuple[BnfAtom, ...]) -> Diagram:
    if len(alt) == 1:
        return _atom_to_diagram(alt[0])
    return Sequence(tuple(_atom_to_diagram(a) for a in alt))


def bnf_rule_to_diagram(rule: BnfRule) -> Diagram:
    """Alternatives fold into right-nested positive stacks."""
    parts = [_alternative_to_diagram(alt) for alt in rule.alternatives]
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Stack(Polarity.POSITIVE, part, result)
    return result


def bnf_to_diagrams(grammar: BnfGrammar) -> list[tuple[str, Diagram]]:
    return [(rule.name, bnf_rule_to_diagram(rule)) for rule in grammar.rules]


# --- oracles (used by tests, exposed for reuse) -------------------------------


def regex_matches(r: Regex, s: str) -> bool:
    """Exact membership by Brzozowski derivatives; fine for short strings."""

    def nullable(r: Regex) -> bool:
        if isinstance(r, (Epsilon, Star)):
            return True
        if isinstance(r, (Empty, Literal)):
            return False
        if isinstance(r, Concat):
            return nullable(r.left) and nullable(r.right)
        if isinstance(r, Union_):
            return nullable(r.left) or nullable(r.right)
        raise TypeError(r)

    def derive(r: Regex, c: str) -> Regex:
        if isinstance(r, (Empty, Epsilon)):
            return EMPTY
        if isinstance(r, Literal):
            # Multi-character literals consume one character at a time.
            if r.symbol and r.symbol[0] == c:
                rest = r.symbol[1:]
                return EPSILON_RE if not rest else Literal(rest)
            return EMPTY
        if isinstance(r, Concat):
            first = Concat(derive(r.left, c), r.right)
            if nullable(r.left):
                return Union_(first, derive(r.right, c))
            return first
        if isinstance(r, Union_):
            return Union_(derive(r.left, c), derive(r.right, c))
        if isinstance(r, Star):
            return Concat(derive(r.inner, c), r)
        raise TypeError(r)

    cur = r
    for c in s:
        cur = derive(cur, c)
    return nullable(cur)


def shortest_member_length(r: Regex) -> float:
    """Length of the shortest string in the language; inf when empty.

    Structural, independent of eliminate_empty; serves as the emptiness
    oracle in tests.
    """
    if isinstance(r, Empty):
        return float("inf")
    if isinstance(r, Epsilon):
        return 0
    if isinstance(r, Literal):
        return len(r.symbol)
    if isinstance(r, Concat):
        return shortest_member_length(r.left) + shortest_member_length(r.right)
    if isinstance(r, Union_):
        return min(shortest_member_length(r.left), shortest_member_length(r.right))
    if isinstance(r, Star):
        return 0
    raise TypeError(r)
