"""The abstract diagram language: tokens, n-ary sequences, binary polarized stacks.

Diagrams carry no geometry.  The concrete syntax is s-expressions::

    "label"        terminal token
    [label]        nonterminal token
    (d ...)        sequence (the empty sequence () is epsilon)
    (+ d d)        positive stack
    (- d d)        negative stack (loops)

Two diagrams are equivalent when they have the same canonical form, obtained
by splicing nested sequences until none remain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from . import _sexpr
from ._sexpr import SexprError as DiagramSyntaxError


class Polarity(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Terminal:
    label: str


@dataclass(frozen=True)
class NonTerminal:
    label: str


@dataclass(frozen=True)
class Sequence:
    children: tuple["Diagram", ...] = ()


@dataclass(frozen=True)
class Stack:
    polarity: Polarity
    top: "Diagram"
    bottom: "Diagram"


Diagram = Union[Terminal, NonTerminal, Sequence, Stack]

#: The distinguished empty sequence.
EPSILON = Sequence(())

_POLARITIES = {"+": Polarity.POSITIVE, "-": Polarity.NEGATIVE}


def _from_sexpr(node) -> Diagram:
    if isinstance(node, _sexpr.Quoted):
        if not node.text:
            raise DiagramSyntaxError("empty terminal label", node.offset)
        return Terminal(node.text)
    if isinstance(node, _sexpr.Bracketed):
        if not node.text:
            raise DiagramSyntaxError("empty nonterminal label", node.offset)
        return NonTerminal(node.text)
    if isinstance(node, _sexpr.Symbol):
        raise DiagramSyntaxError(f"unexpected symbol {node.text!r}", node.offset)
    items = node.items
    if items and isinstance(items[0], _sexpr.Symbol) and items[0].text in _POLARITIES:
        if len(items) != 3:
            raise DiagramSyntaxError(
                f"stack takes exactly 2 subdiagrams, got {len(items) - 1}", node.offset
            )
        pol = _POLARITIES[items[0].text]
        return Stack(pol, _from_sexpr(items[1]), _from_sexpr(items[2]))
    return Sequence(tuple(_from_sexpr(item) for item in items))


def parse_diagram(text: str) -> Diagram:
    """Parse the concrete diagram syntax.  Raises DiagramSyntaxError."""
    return _from_sexpr(_sexpr.parse(text))


def print_diagram(d: Diagram) -> str:
    """Render a diagram back to its concrete syntax (parse round-trips)."""
    if isinstance(d, Terminal):
        return '"%s"' % _sexpr.escape(d.label, '"')
    if isinstance(d, NonTerminal):
        return "[%s]" % _sexpr.escape(d.label, "]")
    if isinstance(d, Sequence):
        return "(%s)" % " ".join(print_diagram(c) for c in d.children)
    if isinstance(d, Stack):
        return "(%s %s %s)" % (d.polarity, print_diagram(d.top), print_diagram(d.bottom))
    raise TypeError(f"not a diagram: {d!r}")


def canonicalize(d: Diagram) -> Diagram:
    """Splice nested sequences until no sequence has a sequence child.

    An empty sequence inside a sequence contributes no subterms, so it
    vanishes, and a sequence of exactly one subdiagram is that subdiagram
    (the degenerate splice; without it, sequence grouping introduced by
    laying out a stack branch would not be equivalence-neutral).  Tokens
    and stacks are preserved in order; stacks are never reassociated.
    Idempotent.
    """
    if isinstance(d, (Terminal, NonTerminal)):
        return d
    if isinstance(d, Stack):
        return Stack(d.polarity, canonicalize(d.top), canonicalize(d.bottom))
    spliced: list[Diagram] = []
    for child in d.children:
        child = canonicalize(child)
        if isinstance(child, Sequence):
            spliced.extend(child.children)
        else:
            spliced.append(child)
    if len(spliced) == 1:
        return spliced[0]
    return Sequence(tuple(spliced))


def equivalent(d1: Diagram, d2: Diagram) -> bool:
    """True iff the two diagrams share a canonical form."""
    return canonicalize(d1) == canonicalize(d2)


def token_skeleton(d: Diagram) -> tuple:
    """Left-to-right token sequence and stack nesting, ignoring sequence grouping.

    Expressed as a flat tuple of tokens and stacks, so any sequence grouping
    (including a singleton wrapper) is invisible.  Canonicalization must keep
    this invariant; used by property tests.
    """
    if isinstance(d, Terminal):
        return (("t", d.label),)
    if isinstance(d, NonTerminal):
        return (("n", d.label),)
    if isinstance(d, Stack):
        return (("stack", d.polarity.value, token_skeleton(d.top), token_skeleton(d.bottom)),)
    parts: list = []
    for child in d.children:
        parts.extend(token_skeleton(child))
    return tuple(parts)


def constructor_count(d: Diagram) -> int:
    """Number of diagram constructors (tokens, sequences, stacks)."""
    if isinstance(d, (Terminal, NonTerminal)):
        return 1
    if isinstance(d, Stack):
        return 1 + constructor_count(d.top) + constructor_count(d.bottom)
    return 1 + sum(constructor_count(c) for c in d.children)
