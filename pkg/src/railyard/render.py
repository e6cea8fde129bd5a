"""Deterministic SVG rendering of well-formed layouts.

Every layout node becomes one ``<g>`` whose nesting mirrors the layout tree,
with stable classes (``rr-rail``, ``rr-station rr-terminal``, ...) so output
can be restyled with CSS.  Text metrics use the same fixed character-advance
model as width accounting, so the root ``width`` attribute equals the
layout's computed width exactly.

Geometry conventions the formalism leaves open: curves are quarter arcs of
radius ``s``; a block VC's side bracket is a vertical spine at 1.5 ``s`` from
the edge with a stub per connectable row; an inline VC's wrap marker is
right-aligned after the first row, and its return rails run through the
inter-row gaps; the backward rail of a loop sits below the forward one.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .diagram import Polarity
from .layout import (
    Direction,
    HConcat,
    Layout,
    Logical,
    Physical,
    Rail,
    Side,
    Space,
    Station,
    StyleConstants,
    VConcatBlock,
    VConcatInline,
    Vertical,
    WFReport,
    _inline_bracketed,
    start_side,
    top_level_well_formed,
    width,
)


class IllFormedLayout(ValueError):
    def __init__(self, report: WFReport):
        super().__init__(f"refusing to render an ill-formed layout:\n{report}")
        self.report = report


@dataclass(frozen=True)
class RenderStyle(StyleConstants):
    """Style constants plus stroke/font/class tokens.

    The corner radius of curves is the unit width ``s`` itself, so drawn
    curve allowances match width accounting.
    """

    stroke_width: float = 2.0
    font_family: str = "ui-monospace, SFMono-Regular, Menlo, monospace"
    font_size: float = 13.0
    class_prefix: str = "rr"
    arrowheads: bool = True
    embed_css: bool = True

    @property
    def corner_radius(self) -> float:
        return self.s


def measure_station(label: str, style: StyleConstants) -> tuple[float, float]:
    """Station box size (without rail stubs); layout and rendering share it."""
    return style.station_intrinsic_width(label), style.station_height


# --- geometry ----------------------------------------------------------------


@dataclass
class Placed:
    """A layout node with absolute geometry.

    ``tips`` maps each side to the y coordinate where the node connects;
    ``rows``/``crows`` list the logical/connectable row connection heights
    visible from each side.
    """

    node: Layout
    x: float
    y: float
    width: float
    height: float
    tips: dict
    rows: dict
    crows: dict
    children: list["Placed"] = field(default_factory=list)


def _resolve(ts, rows: tuple[float, ...]) -> float:
    if isinstance(ts, Logical):
        return rows[min(max(ts.row, 1), len(rows)) - 1]
    if isinstance(ts, Physical):
        return rows[0] + (rows[-1] - rows[0]) * ts.proportion
    return rows[0]


def place_layout(l: Layout, style: StyleConstants, x: float = 0.0, y: float = 0.0) -> Placed:
    """Compute absolute geometry for a layout subtree rooted at (x, y)."""
    placed = _place(l, style)
    _shift(placed, x - placed.x, y - placed.y)
    return placed


def _shift(p: Placed, dx: float, dy: float) -> None:
    p.x += dx
    p.y += dy
    p.tips = {s: v + dy for s, v in p.tips.items()}
    p.rows = {s: tuple(v + dy for v in vs) for s, vs in p.rows.items()}
    p.crows = {s: tuple(v + dy for v in vs) for s, vs in p.crows.items()}
    for c in p.children:
        _shift(c, dx, dy)


def _leaf(node: Layout, w: float, h: float, tip: float) -> Placed:
    return Placed(
        node,
        0.0,
        0.0,
        w,
        h,
        {Side.LEFT: tip, Side.RIGHT: tip},
        {s: (tip,) for s in Side},
        {s: (tip,) for s in Side},
    )


def _place(l: Layout, style: StyleConstants) -> Placed:
    if isinstance(l, Rail):
        return _leaf(l, l.width, 0.0, 0.0)
    if isinstance(l, Space):
        return _leaf(l, 2 * style.s, 0.0, 0.0)
    if isinstance(l, Station):
        w, h = measure_station(l.label, style)
        return _leaf(l, w + 2 * style.s, h, h / 2)

    if isinstance(l, HConcat):
        kids = [_place(c, style) for c in l.children]
        cursor = 0.0
        conn = None
        for k in kids:
            _shift(k, cursor - k.x, 0.0)
            if conn is not None:
                _shift(k, 0.0, conn - k.tips[Side.LEFT])
            conn = k.tips[Side.RIGHT]
            cursor += k.width
        top = min(k.y for k in kids)
        height = max(k.y + k.height for k in kids) - top
        for k in kids:
            _shift(k, 0.0, -top)
        return Placed(
            l,
            0.0,
            0.0,
            cursor,
            height,
            {Side.LEFT: kids[0].tips[Side.LEFT], Side.RIGHT: kids[-1].tips[Side.RIGHT]},
            {Side.LEFT: kids[0].rows[Side.LEFT], Side.RIGHT: kids[-1].rows[Side.RIGHT]},
            {Side.LEFT: kids[0].crows[Side.LEFT], Side.RIGHT: kids[-1].crows[Side.RIGHT]},
            kids,
        )

    if isinstance(l, VConcatInline):
        kids = [_place(c, style) for c in l.children]
        m = style.marker_width(l.marker)
        lb = 3 * style.s if _inline_bracketed(l, Side.LEFT) else 0.0
        rb = 3 * style.s if _inline_bracketed(l, Side.RIGHT) else 0.0
        w1 = max(k.width for k in kids)
        if l.direction is Direction.LTR:
            row_x0 = lb  # marker column sits after the row area
        else:
            row_x0 = lb + m
        total_w = lb + m + w1 + rb
        y_cursor = 0.0
        n = len(kids)
        for i, k in enumerate(kids):
            if l.direction is Direction.LTR:
                kx = row_x0
            else:
                # rows are flush on the start (right) side
                kx = row_x0 + (w1 - k.width)
            _shift(k, kx - k.x, y_cursor - k.y)
            y_cursor += k.height + style.row_gap
        height = y_cursor - style.row_gap
        start = start_side(l.direction)
        endside = start.opposite()
        rows = {
            start: kids[0].rows[start],
            endside: kids[-1].rows[endside],
        }
        crows = {
            start: kids[0].crows[start],
            endside: kids[-1].crows[endside],
        }
        tips = {
            Side.LEFT: _resolve(l.left_ts, rows[Side.LEFT]),
            Side.RIGHT: _resolve(l.right_ts, rows[Side.RIGHT]),
        }
        return Placed(l, 0.0, 0.0, total_w, height, tips, rows, crows, kids)

    if isinstance(l, VConcatBlock):
        topp = _place(l.top, style)
        botp = _place(l.bottom, style)
        lb = 0.0 if isinstance(l.left_ts, Vertical) else 3 * style.s
        rb = 0.0 if isinstance(l.right_ts, Vertical) else 3 * style.s
        _shift(topp, lb - topp.x, -topp.y)
        _shift(botp, lb - botp.x, topp.height + style.row_gap - botp.y)
        height = topp.height + style.row_gap + botp.height
        tips = {}
        rows = {}
        crows = {}
        for side in Side:
            internal = topp.crows[side] + botp.crows[side]
            if l.polarity is Polarity.NEGATIVE:
                internal = (topp.rows[side][0],) + botp.rows[side]
            ts = l.left_ts if side is Side.LEFT else l.right_ts
            if isinstance(ts, Vertical):
                tips[side] = internal[0]
                rows[side] = internal
                crows[side] = internal if l.polarity is Polarity.POSITIVE else (internal[0],)
            else:
                tips[side] = _resolve(ts, internal)
                rows[side] = (tips[side],)
                crows[side] = (tips[side],)
        return Placed(
            l, 0.0, 0.0, topp.width + lb + rb, height, tips, rows, crows, [topp, botp]
        )

    raise TypeError(f"not a layout: {l!r}")


def iter_placed(p: Placed):
    yield p
    for c in p.children:
        yield from iter_placed(c)


# --- SVG emission ------------------------------------------------------------


def _fmt(v: float) -> str:
    r = round(v, 6)
    if r == int(r):
        return str(int(r))
    return repr(r)


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Svg:
    def __init__(self, style: RenderStyle):
        self.style = style
        self.out: list[str] = []
        self.indent = 0

    def line(self, s: str) -> None:
        self.out.append("  " * self.indent + s)

    def open_group(self, classes: str) -> None:
        self.line(f'<g class="{classes}">')
        self.indent += 1

    def close_group(self) -> None:
        self.indent -= 1
        self.line("</g>")

    def path(self, d: str, cls: str = "") -> None:
        attr = f' class="{cls}"' if cls else ""
        self.line(f'<path{attr} d="{d}" fill="none"/>')

    def hline(self, x1: float, x2: float, y: float, cls: str = "") -> None:
        if abs(x1 - x2) < 1e-9:
            return
        self.path(f"M {_fmt(min(x1, x2))} {_fmt(y)} H {_fmt(max(x1, x2))}", cls)

    def vline(self, x: float, y1: float, y2: float, cls: str = "") -> None:
        if abs(y1 - y2) < 1e-9:
            return
        self.path(f"M {_fmt(x)} {_fmt(min(y1, y2))} V {_fmt(max(y1, y2))}", cls)


def _arrow(svg: _Svg, x: float, y: float, direction: Direction) -> None:
    s = 3.5
    dx = s if direction is Direction.LTR else -s
    svg.path(
        f"M {_fmt(x - dx)} {_fmt(y - s)} L {_fmt(x + dx)} {_fmt(y)} L {_fmt(x - dx)} {_fmt(y + s)}",
        f"{svg.style.class_prefix}-arrow",
    )


def _elbow_from_spine(
    svg: _Svg, spine_x: float, y_from: float, x_to: float, y_to: float, r: float
) -> None:
    """Vertical travel along the spine, then a quarter arc into a horizontal."""
    if abs(y_from - y_to) < 1e-9:
        svg.hline(min(spine_x, x_to), max(spine_x, x_to), y_to)
        return
    going_down = y_to > y_from
    sweep_y = y_to - r if going_down else y_to + r
    svg.vline(spine_x, y_from, sweep_y)
    toward_right = x_to > spine_x
    arc_x = spine_x + (r if toward_right else -r)
    sweep = (1 if going_down else 0) if not toward_right else (0 if going_down else 1)
    svg.path(
        f"M {_fmt(spine_x)} {_fmt(sweep_y)} A {_fmt(r)} {_fmt(r)} 0 0 {sweep} "
        f"{_fmt(arc_x)} {_fmt(y_to)}"
    )
    svg.hline(arc_x, x_to, y_to)


def _draw_block_bracket(svg: _Svg, p: Placed, side: Side) -> None:
    l = p.node
    style = svg.style
    ts = l.left_ts if side is Side.LEFT else l.right_ts
    if isinstance(ts, Vertical):
        return
    topp, botp = p.children
    edge_x = p.x if side is Side.LEFT else p.x + p.width
    content_x = topp.x if side is Side.LEFT else topp.x + topp.width
    spine_x = edge_x + (1.5 * style.s if side is Side.LEFT else -1.5 * style.s)
    tip_y = p.tips[side]
    svg.hline(edge_x, spine_x, tip_y)
    targets = list(topp.crows[side]) + list(botp.crows[side])
    for ty in targets:
        _elbow_from_spine(svg, spine_x, tip_y, content_x, ty, style.corner_radius)
    lo = min(targets + [tip_y])
    hi = max(targets + [tip_y])
    svg.vline(spine_x, lo + style.corner_radius, hi - style.corner_radius)


def _draw_inline_routing(svg: _Svg, p: Placed) -> None:
    l = p.node
    style = svg.style
    kids = p.children
    m = style.marker_width(l.marker)
    start = start_side(l.direction)
    endside = start.opposite()

    # tip stubs on both sides
    for side in Side:
        edge_x = p.x if side is Side.LEFT else p.x + p.width
        row = kids[0] if side is start else kids[-1]
        row_edge_x = row.x if side is Side.LEFT else row.x + row.width
        entry_y = row.tips[side]
        tip_y = p.tips[side]
        if abs(tip_y - entry_y) < 1e-9:
            svg.hline(edge_x, row_edge_x, tip_y)
        else:
            spine_x = edge_x + (1.5 * style.s if side is Side.LEFT else -1.5 * style.s)
            svg.hline(edge_x, spine_x, tip_y)
            _elbow_from_spine(svg, spine_x, tip_y, row_edge_x, entry_y, style.corner_radius)

    # return rails between consecutive rows, through the inter-row gap
    r = min(style.corner_radius, style.row_gap / 2 + 1e-9) or style.corner_radius
    for i in range(len(kids) - 1):
        above, below = kids[i], kids[i + 1]
        exit_y = above.tips[endside]
        entry_y = below.tips[start]
        gap_y = (above.y + above.height + below.y) / 2
        if l.direction is Direction.LTR:
            out_x = above.x + above.width
            turn_out = p.x + p.width - (1.0 * style.s)
            turn_in = p.x + 1.0 * style.s
            in_x = below.x
            svg.hline(out_x, turn_out - r, exit_y)
            svg.path(
                f"M {_fmt(turn_out - r)} {_fmt(exit_y)} A {_fmt(r)} {_fmt(r)} 0 0 1 "
                f"{_fmt(turn_out)} {_fmt(exit_y + r)}"
            )
            svg.vline(turn_out, exit_y + r, gap_y - r)
            svg.path(
                f"M {_fmt(turn_out)} {_fmt(gap_y - r)} A {_fmt(r)} {_fmt(r)} 0 0 1 "
                f"{_fmt(turn_out - r)} {_fmt(gap_y)}"
            )
            svg.hline(turn_out - r, turn_in + r, gap_y)
            svg.path(
                f"M {_fmt(turn_in + r)} {_fmt(gap_y)} A {_fmt(r)} {_fmt(r)} 0 0 1 "
                f"{_fmt(turn_in)} {_fmt(gap_y + r)}"
            )
            svg.vline(turn_in, gap_y + r, entry_y - r)
            svg.path(
                f"M {_fmt(turn_in)} {_fmt(entry_y - r)} A {_fmt(r)} {_fmt(r)} 0 0 1 "
                f"{_fmt(turn_in + r)} {_fmt(entry_y)}"
            )
            svg.hline(turn_in + r, in_x, entry_y)
        else:
            out_x = above.x
            turn_out = p.x + 1.0 * style.s
            turn_in = p.x + p.width - (1.0 * style.s)
            in_x = below.x + below.width
            svg.hline(turn_out + r, out_x, exit_y)
            svg.path(
                f"M {_fmt(turn_out + r)} {_fmt(exit_y)} A {_fmt(r)} {_fmt(r)} 0 0 0 "
                f"{_fmt(turn_out)} {_fmt(exit_y + r)}"
            )
            svg.vline(turn_out, exit_y + r, gap_y - r)
            svg.path(
                f"M {_fmt(turn_out)} {_fmt(gap_y - r)} A {_fmt(r)} {_fmt(r)} 0 0 0 "
                f"{_fmt(turn_out + r)} {_fmt(gap_y)}"
            )
            svg.hline(turn_out + r, turn_in - r, gap_y)
            svg.path(
                f"M {_fmt(turn_in - r)} {_fmt(gap_y)} A {_fmt(r)} {_fmt(r)} 0 0 0 "
                f"{_fmt(turn_in)} {_fmt(gap_y + r)}"
            )
            svg.vline(turn_in, gap_y + r, entry_y - r)
            svg.path(
                f"M {_fmt(turn_in)} {_fmt(entry_y - r)} A {_fmt(r)} {_fmt(r)} 0 0 0 "
                f"{_fmt(turn_in - r)} {_fmt(entry_y)}"
            )
            svg.hline(in_x, turn_in - r, entry_y)

    # marker glyph, right-aligned against the first row's exit
    if l.marker:
        first = kids[0]
        if l.direction is Direction.LTR:
            mx = first.x + first.width + m / 2
        else:
            mx = first.x - m / 2
        my = first.tips[endside] - 0.35 * style.font_size
        svg.line(
            f'<text class="{style.class_prefix}-marker" x="{_fmt(mx)}" y="{_fmt(my)}" '
            f'text-anchor="middle">{_esc(l.marker)}</text>'
        )


def _draw(svg: _Svg, p: Placed) -> None:
    style = svg.style
    pre = style.class_prefix
    node = p.node
    if isinstance(node, Rail):
        svg.open_group(f"{pre}-rail")
        svg.hline(p.x, p.x + p.width, p.tips[Side.LEFT])
        if style.arrowheads and node.direction is Direction.RTL and p.width >= 4 * style.s:
            _arrow(svg, p.x + p.width / 2, p.tips[Side.LEFT], node.direction)
        svg.close_group()
        return
    if isinstance(node, Space):
        svg.open_group(f"{pre}-space")
        svg.hline(p.x, p.x + p.width, p.tips[Side.LEFT])
        svg.close_group()
        return
    if isinstance(node, Station):
        kind = f"{pre}-terminal" if node.terminal else f"{pre}-nonterminal"
        svg.open_group(f"{pre}-station {kind}")
        s = style.s
        mid = p.tips[Side.LEFT]
        svg.hline(p.x, p.x + s, mid)
        svg.hline(p.x + p.width - s, p.x + p.width, mid)
        rx = style.corner_radius if node.terminal else 0.0
        radius = f' rx="{_fmt(rx)}"' if rx else ""
        svg.line(
            f'<rect x="{_fmt(p.x + s)}" y="{_fmt(p.y)}" width="{_fmt(p.width - 2 * s)}" '
            f'height="{_fmt(p.height)}"{radius}/>'
        )
        tx = p.x + p.width / 2
        ty = p.y + p.height / 2 + 0.35 * style.font_size
        svg.line(
            f'<text x="{_fmt(tx)}" y="{_fmt(ty)}" text-anchor="middle">{_esc(node.label)}</text>'
        )
        svg.close_group()
        return
    if isinstance(node, HConcat):
        svg.open_group(f"{pre}-hconcat")
        for c in p.children:
            _draw(svg, c)
        svg.close_group()
        return
    if isinstance(node, VConcatInline):
        svg.open_group(f"{pre}-vc-inline")
        _draw_inline_routing(svg, p)
        for c in p.children:
            _draw(svg, c)
        svg.close_group()
        return
    if isinstance(node, VConcatBlock):
        polarity = f"{pre}-pos" if node.polarity is Polarity.POSITIVE else f"{pre}-neg"
        svg.open_group(f"{pre}-vc-block {polarity}")
        for side in Side:
            _draw_block_bracket(svg, p, side)
        for c in p.children:
            _draw(svg, c)
        svg.close_group()
        return
    raise TypeError(f"not a layout: {node!r}")


_DEFAULT_CSS = """\
svg.{pre}-diagram path {{ stroke: #222; stroke-width: {stroke}; fill: none; }}
svg.{pre}-diagram rect {{ stroke: #222; stroke-width: {stroke}; fill: #fdfdfb; }}
svg.{pre}-diagram .{pre}-nonterminal rect {{ fill: #eef3fa; }}
svg.{pre}-diagram text {{ font: {size}px {family}; fill: #111; stroke: none; }}
svg.{pre}-diagram .{pre}-arrow {{ fill: none; }}
"""


def render_svg(l: Layout, style: RenderStyle | None = None) -> str:
    """Render a top-level well-formed layout to an SVG document string."""
    style = style or RenderStyle()
    report = top_level_well_formed(l, style)
    if not report.ok:
        raise IllFormedLayout(report)

    pad = style.stroke_width
    placed = place_layout(l, style, 0.0, pad)
    w = width(l, style)
    h = placed.height + 2 * pad
    svg = _Svg(style)
    svg.line(
        f'<svg xmlns="http://www.w3.org/2000/svg" class="{style.class_prefix}-diagram" '
        f'width="{_fmt(w)}" height="{_fmt(h)}" viewBox="0 0 {_fmt(w)} {_fmt(h)}">'
    )
    svg.indent += 1
    if style.embed_css:
        css = _DEFAULT_CSS.format(
            pre=style.class_prefix,
            stroke=_fmt(style.stroke_width),
            size=_fmt(style.font_size),
            family=style.font_family,
        )
        svg.line("<style>")
        for row in css.strip().splitlines():
            svg.line(row)
        svg.line("</style>")
    _draw(svg, placed)
    svg.indent -= 1
    svg.line("</svg>")
    return "\n".join(svg.out) + "\n"
