"""The concrete layout language and its derived metrics.

A layout is a sized, positioned-in-principle structure: rails, spaces,
stations, horizontal concatenations, and two kinds of vertical concatenation
(inline VCs from line wrapping, block VCs from stacks).  This module defines

* the layout tree and tip specifications,
* width, logical/connectable row counts, and up/down-connectability,
* the well-formedness judgment, reported as structured violations,
* ``diagram_of``, recovering the abstract diagram from a layout,
* an s-expression reader/printer for the concrete layout syntax.

All metric functions are total: they are defined on ill-formed layouts too.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

from . import _sexpr
from ._sexpr import SexprError as LayoutSyntaxError
from .diagram import (
    Diagram,
    NonTerminal,
    Polarity,
    Sequence,
    Stack,
    Terminal,
)

WF_EPS = 1e-6


class Direction(enum.Enum):
    LTR = "ltr"
    RTL = "rtl"

    def flipped(self) -> "Direction":
        return Direction.RTL if self is Direction.LTR else Direction.LTR

    def apply_polarity(self, pol: Polarity) -> "Direction":
        """Negative polarity flips the direction of a stack's bottom branch."""
        return self.flipped() if pol is Polarity.NEGATIVE else self

    def __str__(self) -> str:
        return self.value


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    def opposite(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


def start_side(direction: Direction) -> Side:
    return Side.LEFT if direction is Direction.LTR else Side.RIGHT


def end_side(direction: Direction) -> Side:
    return start_side(direction).opposite()


class Connectability(enum.Enum):
    NEITHER = "neither"
    UP = "up"
    DOWN = "down"
    BOTH = "both"

    @property
    def up(self) -> bool:
        return self in (Connectability.UP, Connectability.BOTH)

    @property
    def down(self) -> bool:
        return self in (Connectability.DOWN, Connectability.BOTH)

    @staticmethod
    def from_flags(up: bool, down: bool) -> "Connectability":
        if up and down:
            return Connectability.BOTH
        if up:
            return Connectability.UP
        if down:
            return Connectability.DOWN
        return Connectability.NEITHER

    def covers(self, other: "Connectability") -> bool:
        """The capability order: self can do everything other can."""
        return (self.up or not other.up) and (self.down or not other.down)


# --- tip specifications -----------------------------------------------------


@dataclass(frozen=True)
class Vertical:
    pass


@dataclass(frozen=True)
class Logical:
    row: int


@dataclass(frozen=True)
class Physical:
    proportion: float


TipSpec = Union[Vertical, Logical, Physical]

VERTICAL = Vertical()
LOGICAL_1 = Logical(1)


# --- layout tree ------------------------------------------------------------


@dataclass(frozen=True)
class Rail:
    direction: Direction
    width: float


@dataclass(frozen=True)
class Space:
    direction: Direction


@dataclass(frozen=True)
class Station:
    direction: Direction
    label: str
    terminal: bool


@dataclass(frozen=True)
class HConcat:
    direction: Direction
    children: tuple["Layout", ...]


@dataclass(frozen=True)
class VConcatInline:
    direction: Direction
    left_ts: TipSpec
    right_ts: TipSpec
    marker: str
    children: tuple["Layout", ...]


@dataclass(frozen=True)
class VConcatBlock:
    direction: Direction
    left_ts: TipSpec
    right_ts: TipSpec
    polarity: Polarity
    top: "Layout"
    bottom: "Layout"


Layout = Union[Rail, Space, Station, HConcat, VConcatInline, VConcatBlock]


@dataclass(frozen=True)
class StyleConstants:
    """Length constants shared by width accounting and rendering.

    ``s`` is the unit width reserved around curves and boxes; station and
    marker text metrics use a fixed per-character advance so that layout and
    rendering agree exactly.
    """

    s: float = 10.0
    char_width: float = 8.0
    text_pad: float = 5.0
    marker_char_width: float = 8.0
    marker: str = "↪"
    row_gap: float = 6.0
    station_height: float = 24.0

    def station_intrinsic_width(self, label: str) -> float:
        return self.char_width * len(label) + 2 * self.text_pad

    def station_width(self, label: str) -> float:
        return self.station_intrinsic_width(label) + 2 * self.s

    def marker_width(self, marker: str) -> float:
        return self.marker_char_width * len(marker)


def tip_on(l: Layout, side: Side) -> TipSpec:
    """The tip specification of a layout on a side; non-VCs default to logical 1."""
    if isinstance(l, (VConcatInline, VConcatBlock)):
        return l.left_ts if side is Side.LEFT else l.right_ts
    return LOGICAL_1


def _sidemost(children: tuple[Layout, ...], side: Side) -> Layout:
    return children[0] if side is Side.LEFT else children[-1]


def _inline_edge_child(vc: VConcatInline, side: Side) -> Layout:
    """First sublayout on the start side, last on the end side."""
    return vc.children[0] if side is start_side(vc.direction) else vc.children[-1]


def _inline_bracketed(vc: VConcatInline, side: Side) -> bool:
    """A side of an inline VC carries a bracket unless its tip pins the edge.

    Only a physical 0 on the start side (or physical 1 on the end side) is
    exempt; logical and vertical tips are charged.
    """
    ts = tip_on(vc, side)
    if isinstance(ts, Physical):
        exempt = 0.0 if side is start_side(vc.direction) else 1.0
        return ts.proportion != exempt
    return True


def width(l: Layout, style: StyleConstants) -> float:
    """Layout width; defined on all layouts, well-formed or not."""
    if isinstance(l, Rail):
        return l.width
    if isinstance(l, Space):
        return 2 * style.s
    if isinstance(l, Station):
        return style.station_width(l.label)
    if isinstance(l, HConcat):
        return sum(width(c, style) for c in l.children)
    if isinstance(l, VConcatInline):
        w = width(l.children[0], style) + style.marker_width(l.marker)
        for side in Side:
            if _inline_bracketed(l, side):
                w += 3 * style.s
        return w
    if isinstance(l, VConcatBlock):
        w = width(l.top, style)
        for ts in (l.left_ts, l.right_ts):
            if not isinstance(ts, Vertical):
                w += 3 * style.s
        return w
    raise TypeError(f"not a layout: {l!r}")


def vc_tip_rows(l: Layout, side: Side) -> int:
    """Row count a VC's own tip specification is resolved against.

    For block VCs this is the vertical-tip row structure built from the
    sublayouts, independent of the VC's own tips (which select within it).
    """
    if isinstance(l, VConcatInline):
        return logical_rows(_inline_edge_child(l, side), side)
    if isinstance(l, VConcatBlock):
        if l.polarity is Polarity.POSITIVE:
            return connectable_rows(l.top, side) + connectable_rows(l.bottom, side)
        return (
            logical_rows(l.top, side)
            + logical_rows(l.bottom, side)
            - connectable_rows(l.top, side)
            + 1
        )
    return logical_rows(l, side)


def logical_rows(l: Layout, side: Side) -> int:
    if isinstance(l, (Rail, Space, Station)):
        return 1
    if isinstance(l, HConcat):
        return logical_rows(_sidemost(l.children, side), side)
    if isinstance(l, VConcatInline):
        return logical_rows(_inline_edge_child(l, side), side)
    if isinstance(l, VConcatBlock):
        if not isinstance(tip_on(l, side), Vertical):
            return 1
        return vc_tip_rows(l, side)
    raise TypeError(f"not a layout: {l!r}")


def connectable_rows(l: Layout, side: Side) -> int:
    """Equals logical_rows except a vertical-tip negative block VC has one."""
    if (
        isinstance(l, VConcatBlock)
        and l.polarity is Polarity.NEGATIVE
        and isinstance(tip_on(l, side), Vertical)
    ):
        return 1
    return logical_rows(l, side)


def connectability(l: Layout, side: Side) -> Connectability:
    if isinstance(l, (Rail, Station)):
        return Connectability.NEITHER
    if isinstance(l, Space):
        return Connectability.BOTH
    if isinstance(l, HConcat):
        return connectability(_sidemost(l.children, side), side)
    if isinstance(l, VConcatInline):
        return connectability(_inline_edge_child(l, side), side)
    if isinstance(l, VConcatBlock):
        if not isinstance(tip_on(l, side), Vertical):
            return Connectability.NEITHER
        # Up-connectability is blocked when the top sublayout is a block VC of
        # the opposite polarity; down, when the bottom is a negative block VC.
        if isinstance(l.top, VConcatBlock) and l.top.polarity is not l.polarity:
            up = False
        else:
            up = connectability(l.top, side).up
        if isinstance(l.bottom, VConcatBlock) and l.bottom.polarity is Polarity.NEGATIVE:
            down = False
        else:
            down = connectability(l.bottom, side).down
        return Connectability.from_flags(up, down)
    raise TypeError(f"not a layout: {l!r}")


# --- well-formedness --------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    path: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        where = "/".join(str(i) for i in self.path) or "<root>"
        return f"{self.rule} at {where}: {self.message}"


@dataclass
class WFReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "well-formed"
        return "\n".join(str(v) for v in self.violations)


def _check_tip(
    l: Layout, side: Side, path: tuple[int, ...], out: list[Violation]
) -> None:
    ts = tip_on(l, side)
    if isinstance(ts, Logical):
        rows = vc_tip_rows(l, side)
        if not (1 <= ts.row <= rows):
            out.append(
                Violation(
                    "WF_t",
                    path,
                    f"{side.value} tip (logical {ts.row}) exceeds {rows} row(s)",
                )
            )
    elif isinstance(ts, Physical):
        if not (0.0 <= ts.proportion <= 1.0):
            out.append(
                Violation(
                    "WF_t", path, f"{side.value} physical tip {ts.proportion} outside [0, 1]"
                )
            )
    elif isinstance(ts, Vertical):
        if connectability(l, side) is Connectability.NEITHER:
            out.append(
                Violation(
                    "WF_t",
                    path,
                    f"vertical {side.value} tip on a layout that is neither-connectable there",
                )
            )


def _check(l: Layout, style: StyleConstants, eps: float, path: tuple[int, ...], out: list[Violation]) -> None:
    if isinstance(l, (Rail, Space, Station)):
        if isinstance(l, Rail) and l.width < 0:
            out.append(Violation("WF_st", path, f"negative rail width {l.width}"))
        return

    if isinstance(l, HConcat):
        for i, child in enumerate(l.children):
            if child.direction is not l.direction:
                out.append(
                    Violation("WF_c", path + (i,), "sublayout direction differs from concatenation")
                )
            _check(child, style, eps, path + (i,), out)
        # Interior-facing connectable sides are violations, with one carve-out:
        # an edge space's inner side.  Spaces are the positive base case of
        # connectability, inserted at row ends precisely so a containing
        # block's bracket can reach into them.
        n = len(l.children)
        for i, child in enumerate(l.children):
            if i > 0 and connectability(child, Side.LEFT) is not Connectability.NEITHER:
                if not (i == n - 1 and isinstance(child, Space)):
                    out.append(
                        Violation(
                            "WF_hc", path + (i,), "interior sublayout connectable on its left"
                        )
                    )
            if i < n - 1 and connectability(child, Side.RIGHT) is not Connectability.NEITHER:
                if not (i == 0 and isinstance(child, Space)):
                    out.append(
                        Violation(
                            "WF_hc", path + (i,), "interior sublayout connectable on its right"
                        )
                    )
        return

    if isinstance(l, VConcatInline):
        for i, child in enumerate(l.children):
            if child.direction is not l.direction:
                out.append(
                    Violation("WF_c", path + (i,), "sublayout direction differs from concatenation")
                )
            _check(child, style, eps, path + (i,), out)
        for side in Side:
            _check_tip(l, side, path, out)
        n = len(l.children)
        start, end = start_side(l.direction), end_side(l.direction)
        for i, child in enumerate(l.children):
            if i > 0 and connectability(child, start) is not Connectability.NEITHER:
                out.append(
                    Violation("WF_ivc", path + (i,), "non-first row connectable on the start side")
                )
            if i < n - 1 and connectability(child, end) is not Connectability.NEITHER:
                out.append(
                    Violation("WF_ivc", path + (i,), "non-last row connectable on the end side")
                )
        m = style.marker_width(l.marker)
        w_first = width(l.children[0], style)
        w_last = width(l.children[-1], style)
        if abs(w_first - w_last) > eps:
            out.append(
                Violation(
                    "WF_ivc", path, f"first and last rows differ in width ({w_first} vs {w_last})"
                )
            )
        if w_first < m - eps:
            out.append(
                Violation("WF_ivc", path, f"row width {w_first} below marker width {m}")
            )
        for i, child in enumerate(l.children[1:-1], start=1):
            w_mid = width(child, style)
            if abs(w_mid - (w_first - m)) > eps:
                out.append(
                    Violation(
                        "WF_ivc",
                        path + (i,),
                        f"interior row width {w_mid}, expected {w_first - m}",
                    )
                )
        return

    if isinstance(l, VConcatBlock):
        _check(l.top, style, eps, path + (0,), out)
        _check(l.bottom, style, eps, path + (1,), out)
        for side in Side:
            _check_tip(l, side, path, out)
        if l.top.direction is not l.direction:
            out.append(Violation("WF_bvc", path + (0,), "top sublayout direction differs"))
        expected_bot = l.direction.apply_polarity(l.polarity)
        if l.bottom.direction is not expected_bot:
            out.append(
                Violation(
                    "WF_bvc", path + (1,), f"bottom sublayout direction must be {expected_bot}"
                )
            )
        w_top = width(l.top, style)
        w_bot = width(l.bottom, style)
        if abs(w_top - w_bot) > eps:
            out.append(
                Violation("WF_bvc", path, f"sublayout widths differ ({w_top} vs {w_bot})")
            )
        for side in Side:
            if not connectability(l.top, side).covers(Connectability.DOWN):
                out.append(
                    Violation(
                        "WF_bvc", path + (0,), f"top sublayout not down-connectable on the {side.value}"
                    )
                )
            if not connectability(l.bottom, side).covers(Connectability.UP):
                out.append(
                    Violation(
                        "WF_bvc", path + (1,), f"bottom sublayout not up-connectable on the {side.value}"
                    )
                )
        return

    raise TypeError(f"not a layout: {l!r}")


def well_formed(l: Layout, style: StyleConstants | None = None, eps: float = WF_EPS) -> WFReport:
    """Check every well-formedness rule recursively; violations are data."""
    style = style or StyleConstants()
    out: list[Violation] = []
    _check(l, style, eps, (), out)
    return WFReport(out)


def top_level_well_formed(
    l: Layout, style: StyleConstants | None = None, eps: float = WF_EPS
) -> WFReport:
    """well_formed plus the outermost condition: neither-connectable both sides."""
    report = well_formed(l, style, eps)
    for side in Side:
        if connectability(l, side) is not Connectability.NEITHER:
            report.violations.append(
                Violation("WF_top", (), f"outermost layout connectable on the {side.value}")
            )
    return report


# --- diagram extraction -----------------------------------------------------


def diagram_of(l: Layout) -> Diagram:
    """Recover the abstract diagram a layout lays out."""
    if isinstance(l, (Rail, Space)):
        return Sequence(())
    if isinstance(l, Station):
        return Terminal(l.label) if l.terminal else NonTerminal(l.label)
    if isinstance(l, HConcat):
        children = l.children if l.direction is Direction.LTR else tuple(reversed(l.children))
        return Sequence(tuple(diagram_of(c) for c in children))
    if isinstance(l, VConcatInline):
        return Sequence(tuple(diagram_of(c) for c in l.children))
    if isinstance(l, VConcatBlock):
        return Stack(l.polarity, diagram_of(l.top), diagram_of(l.bottom))
    raise TypeError(f"not a layout: {l!r}")


# --- concrete layout syntax -------------------------------------------------

_DIRECTIONS = {"ltr": Direction.LTR, "rtl": Direction.RTL}
_POLARITIES = {"+": Polarity.POSITIVE, "-": Polarity.NEGATIVE}


def _parse_number(tok, what: str) -> float:
    if isinstance(tok, _sexpr.Symbol):
        try:
            return float(tok.text)
        except ValueError:
            pass
    raise LayoutSyntaxError(f"expected a {what}", getattr(tok, "offset", 0))


def _parse_symbol(tok, table: dict, what: str):
    if isinstance(tok, _sexpr.Symbol) and tok.text in table:
        return table[tok.text]
    raise LayoutSyntaxError(f"expected a {what}", getattr(tok, "offset", 0))


def _parse_string(tok, what: str) -> str:
    if isinstance(tok, (_sexpr.Quoted, _sexpr.Bracketed)):
        return tok.text
    if isinstance(tok, _sexpr.Symbol):
        return tok.text
    raise LayoutSyntaxError(f"expected a {what}", getattr(tok, "offset", 0))


def _parse_tipspec(tok) -> TipSpec:
    if isinstance(tok, _sexpr.Symbol) and tok.text == "vertical":
        return VERTICAL
    if isinstance(tok, _sexpr.Node) and tok.items and isinstance(tok.items[0], _sexpr.Symbol):
        kind = tok.items[0].text
        if kind == "logical" and len(tok.items) == 2:
            row = _parse_number(tok.items[1], "row number")
            if row != int(row) or row < 1:
                raise LayoutSyntaxError("logical row must be a positive integer", tok.offset)
            return Logical(int(row))
        if kind == "physical" and len(tok.items) == 2:
            p = _parse_number(tok.items[1], "proportion")
            if not (0.0 <= p <= 1.0):
                raise LayoutSyntaxError("physical proportion must be in [0, 1]", tok.offset)
            return Physical(p)
    raise LayoutSyntaxError("expected a tip specification", getattr(tok, "offset", 0))


def _layout_from_sexpr(node) -> Layout:
    if not isinstance(node, _sexpr.Node) or not node.items:
        raise LayoutSyntaxError("expected a layout form", getattr(node, "offset", 0))
    head = node.items[0]
    if not isinstance(head, _sexpr.Symbol):
        raise LayoutSyntaxError("expected a layout constructor name", node.offset)
    kind = head.text
    rest = node.items[1:]
    if kind == "rail":
        if len(rest) != 2:
            raise LayoutSyntaxError("rail takes direction and width", node.offset)
        w = _parse_number(rest[1], "width")
        if w < 0:
            raise LayoutSyntaxError("rail width must be nonnegative", node.offset)
        return Rail(_parse_symbol(rest[0], _DIRECTIONS, "direction"), w)
    if kind == "space":
        if len(rest) != 1:
            raise LayoutSyntaxError("space takes a direction", node.offset)
        return Space(_parse_symbol(rest[0], _DIRECTIONS, "direction"))
    if kind == "station":
        if len(rest) != 3:
            raise LayoutSyntaxError("station takes direction, label, terminal flag", node.offset)
        flag = _parse_symbol(rest[2], {"#t": True, "#f": False}, "boolean")
        return Station(
            _parse_symbol(rest[0], _DIRECTIONS, "direction"),
            _parse_string(rest[1], "label"),
            flag,
        )
    if kind == "hconcat":
        if len(rest) < 2:
            raise LayoutSyntaxError("hconcat takes a direction and >= 1 sublayout", node.offset)
        return HConcat(
            _parse_symbol(rest[0], _DIRECTIONS, "direction"),
            tuple(_layout_from_sexpr(x) for x in rest[1:]),
        )
    if kind == "vconcat-inline":
        if len(rest) < 6:
            raise LayoutSyntaxError(
                "vconcat-inline takes direction, two tips, marker, >= 2 sublayouts", node.offset
            )
        return VConcatInline(
            _parse_symbol(rest[0], _DIRECTIONS, "direction"),
            _parse_tipspec(rest[1]),
            _parse_tipspec(rest[2]),
            _parse_string(rest[3], "marker"),
            tuple(_layout_from_sexpr(x) for x in rest[4:]),
        )
    if kind == "vconcat-block":
        if len(rest) != 6:
            raise LayoutSyntaxError(
                "vconcat-block takes direction, two tips, polarity, two sublayouts", node.offset
            )
        return VConcatBlock(
            _parse_symbol(rest[0], _DIRECTIONS, "direction"),
            _parse_tipspec(rest[1]),
            _parse_tipspec(rest[2]),
            _parse_symbol(rest[3], _POLARITIES, "polarity"),
            _layout_from_sexpr(rest[4]),
            _layout_from_sexpr(rest[5]),
        )
    raise LayoutSyntaxError(f"unknown layout constructor {kind!r}", node.offset)


def parse_layout(text: str) -> Layout:
    return _layout_from_sexpr(_sexpr.parse(text))


def _print_tipspec(ts: TipSpec) -> str:
    if isinstance(ts, Vertical):
        return "vertical"
    if isinstance(ts, Logical):
        return f"(logical {ts.row})"
    return f"(physical {_sexpr.format_number(ts.proportion)})"


def print_layout(l: Layout, indent: int | None = None) -> str:
    """Concrete layout syntax; multiline when ``indent`` is given."""

    def go(l: Layout, depth: int) -> str:
        if indent is None:
            sep = lambda _: " "
            tail = ""
        else:
            pad = " " * (indent * (depth + 1))
            sep = lambda first: " " if first else "\n" + pad
            tail = ""
        if isinstance(l, Rail):
            return f"(rail {l.direction} {_sexpr.format_number(l.width)})"
        if isinstance(l, Space):
            return f"(space {l.direction})"
        if isinstance(l, Station):
            flag = "#t" if l.terminal else "#f"
            return f'(station {l.direction} "{_sexpr.escape(l.label, chr(34))}" {flag})'
        if isinstance(l, HConcat):
            parts = [go(c, depth + 1) for c in l.children]
            body = "".join(sep(False) + p for p in parts)
            return f"(hconcat {l.direction}{body}){tail}"
        if isinstance(l, VConcatInline):
            head = (
                f"(vconcat-inline {l.direction} {_print_tipspec(l.left_ts)} "
                f'{_print_tipspec(l.right_ts)} "{_sexpr.escape(l.marker, chr(34))}"'
            )
            parts = [go(c, depth + 1) for c in l.children]
            return head + "".join(sep(False) + p for p in parts) + ")"
        if isinstance(l, VConcatBlock):
            head = (
                f"(vconcat-block {l.direction} {_print_tipspec(l.left_ts)} "
                f"{_print_tipspec(l.right_ts)} {l.polarity}"
            )
            return head + sep(False) + go(l.top, depth + 1) + sep(False) + go(l.bottom, depth + 1) + ")"
        raise TypeError(f"not a layout: {l!r}")

    return go(l, 0)
