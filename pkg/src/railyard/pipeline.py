"""Three-step compilation from diagrams to layouts.

The lowering proceeds through explicit intermediate trees:

1. *Immediate*: tokens become stations, stacks become blocks, and the
   bottom branch of a negative stack flips direction (its sequences are
   stored reversed, in visual order).
2. *Aligned*: every block sublayout becomes a sequence, spaces appear at
   sequence ends inside blocks so the block's brackets have something to
   connect to, and every sequence/block carries tip specifications chosen by
   the ``align_items`` policy (with vertical tips for collapsing where the
   ``justify_content`` policy keeps the stack flush against its container).
3. *Wrapped*: each sequence position becomes an ordered set of candidate
   wraps (compositions of rows), or a single chosen wrap in global mode.
4. *Justified*: spare width is distributed as rails, recursively, producing
   a well-formed layout of exactly the requested width.

Wrapping is treated as optimization: candidates are ranked by a pluggable
``WrapOrder``; global mode searches over all sequence positions at once
under a budget, local mode decides per sequence during justification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from . import _sexpr
from .diagram import Diagram, NonTerminal, Polarity, Sequence, Stack, Terminal, canonicalize
from .layout import (
    Direction,
    HConcat,
    Layout,
    Logical,
    LOGICAL_1,
    Physical,
    Rail,
    Side,
    Space,
    Station,
    StyleConstants,
    TipSpec,
    VConcatBlock,
    VConcatInline,
    Vertical,
    VERTICAL,
    end_side,
    start_side,
    width,
)

_EPS = 1e-9

ALIGN_POLICIES = ("top", "center", "bottom", "baseline")
JUSTIFY_POLICIES = ("start", "end", "center", "space-between", "space-around", "space-evenly")
WRAP_MODES = ("local", "global")


class TargetTooSmall(ValueError):
    """The requested width is below the diagram's min-content."""

    def __init__(self, target: float, min_content: float):
        super().__init__(
            f"target width {target:g} is below the minimum content width {min_content:g}"
        )
        self.target = target
        self.min_content = min_content


class NoFeasibleWrap(TargetTooSmall):
    """No wrap fits the target width (same condition as TargetTooSmall)."""


def _default_wrap_length_penalty(wrap_length: int) -> float:
    return float(wrap_length)


def _default_depth_penalty(depth: int) -> float:
    return float(4**depth)


@dataclass(frozen=True)
class WrapOrder:
    """Penalty functions and the combination rule ranking wraps.

    ``p_wl`` and ``p_d`` must be positive and monotonic.  ``mode`` selects the
    global combination: ``lexicographic`` prefers greater content width, then
    lower wrap penalty, then lower height; ``weighted`` minimizes a linear
    combination instead.
    """

    p_wl: Callable[[int], float] = _default_wrap_length_penalty
    p_d: Callable[[int], float] = _default_depth_penalty
    mode: str = "lexicographic"
    content_weight: float = 1.0
    penalty_weight: float = 1.0
    height_weight: float = 1.0

    def term_penalty(self, wrap_length: int, depth: int) -> float:
        return self.p_wl(wrap_length) * self.p_d(depth)

    def local_key(self, wrap: "SeqWrap", target: float):
        """Sort key for per-sequence selection at a known target width.

        Primary: squared overflow of max-content plus ten times the wrap's
        own penalty term.  Secondary: max-content.  Final tie-break: the wrap
        specification itself.
        """
        overflow = max(0.0, wrap.max_content - target)
        score = overflow * overflow + 10.0 * self.term_penalty(len(wrap.spec), wrap.depth)
        return (score, wrap.max_content, wrap.spec)


@dataclass(frozen=True)
class LayoutParams:
    target_width: float
    wrap_mode: str = "local"
    align_items: str = "baseline"
    justify_content: str = "start"
    flex_absorb: float = 0.5
    gap: float = 0.0
    style: StyleConstants = field(default_factory=StyleConstants)
    order: WrapOrder = field(default_factory=WrapOrder)
    global_budget: int = 100_000
    max_free_points: int = 12

    def validate(self) -> None:
        if self.wrap_mode not in WRAP_MODES:
            raise ValueError(f"wrap_mode must be one of {WRAP_MODES}, got {self.wrap_mode!r}")
        if self.align_items not in ALIGN_POLICIES:
            raise ValueError(
                f"align_items must be one of {ALIGN_POLICIES}, got {self.align_items!r}"
            )
        if self.justify_content not in JUSTIFY_POLICIES:
            raise ValueError(
                f"justify_content must be one of {JUSTIFY_POLICIES}, got {self.justify_content!r}"
            )
        if not (0.0 <= self.flex_absorb <= 1.0):
            raise ValueError(f"flex_absorb must be in [0, 1], got {self.flex_absorb}")
        if self.gap < 0:
            raise ValueError(f"gap must be nonnegative, got {self.gap}")


# --- immediate diagrams -------------------------------------------------------


@dataclass(frozen=True)
class ISeq:
    direction: Direction
    children: tuple["ImmediateDiagram", ...]


@dataclass(frozen=True)
class IBlock:
    direction: Direction
    polarity: Polarity
    top: "ImmediateDiagram"
    bottom: "ImmediateDiagram"


ImmediateDiagram = Union[Station, ISeq, IBlock]


def to_immediate(d: Diagram, direction: Direction = Direction.LTR) -> ImmediateDiagram:
    """Immediate lowering.  Expects a canonical diagram.

    Sequences lowered into a right-to-left context store their children
    reversed, i.e. in visual order.
    """
    if isinstance(d, Terminal):
        return Station(direction, d.label, True)
    if isinstance(d, NonTerminal):
        return Station(direction, d.label, False)
    if isinstance(d, Sequence):
        children = tuple(to_immediate(c, direction) for c in d.children)
        if direction is Direction.RTL:
            children = tuple(reversed(children))
        return ISeq(direction, children)
    if isinstance(d, Stack):
        return IBlock(
            direction,
            d.polarity,
            to_immediate(d.top, direction),
            to_immediate(d.bottom, direction.apply_polarity(d.polarity)),
        )
    raise TypeError(f"not a diagram: {d!r}")


# --- aligned diagrams ---------------------------------------------------------


@dataclass(frozen=True)
class ASeq:
    direction: Direction
    left_ts: TipSpec
    right_ts: TipSpec
    children: tuple["AlignedDiagram", ...]


@dataclass(frozen=True)
class ABlock:
    direction: Direction
    left_ts: TipSpec
    right_ts: TipSpec
    polarity: Polarity
    top: "ASeq"
    bottom: "ASeq"


AlignedDiagram = Union[Station, Space, ASeq, ABlock]


def _aligned_tip(node: AlignedDiagram, side: Side) -> TipSpec:
    if isinstance(node, (ASeq, ABlock)):
        return node.left_ts if side is Side.LEFT else node.right_ts
    return LOGICAL_1


def _aligned_logical_rows(node: AlignedDiagram, side: Side) -> int:
    if isinstance(node, (Station, Space)):
        return 1
    if isinstance(node, ASeq):
        if not node.children:
            return 1
        edge = node.children[0] if side is Side.LEFT else node.children[-1]
        return _aligned_logical_rows(edge, side)
    if isinstance(node, ABlock):
        if not isinstance(_aligned_tip(node, side), Vertical):
            return 1
        return _aligned_vc_tip_rows(node, side)
    raise TypeError(f"not an aligned diagram: {node!r}")


def _aligned_connectable_rows(node: AlignedDiagram, side: Side) -> int:
    if (
        isinstance(node, ABlock)
        and node.polarity is Polarity.NEGATIVE
        and isinstance(_aligned_tip(node, side), Vertical)
    ):
        return 1
    return _aligned_logical_rows(node, side)


def _aligned_vc_tip_rows(block: ABlock, side: Side) -> int:
    if block.polarity is Polarity.POSITIVE:
        return _aligned_connectable_rows(block.top, side) + _aligned_connectable_rows(
            block.bottom, side
        )
    return (
        _aligned_logical_rows(block.top, side)
        + _aligned_logical_rows(block.bottom, side)
        - _aligned_connectable_rows(block.top, side)
        + 1
    )


def _policy_tip(block: ABlock, side: Side, policy: str, top_is_epsilon: bool) -> TipSpec:
    if policy == "top":
        return LOGICAL_1
    if policy == "center":
        return Physical(0.5)
    if policy == "bottom":
        return Logical(_aligned_vc_tip_rows(block, side))
    if policy == "baseline":
        if (
            block.polarity is Polarity.POSITIVE
            and top_is_epsilon
            and _aligned_logical_rows(block.bottom, side) == 1
        ):
            return Logical(2)
        return LOGICAL_1
    raise ValueError(f"unknown align-items policy {policy!r}")


def _is_epsilon_immediate(node: ImmediateDiagram) -> bool:
    return isinstance(node, ISeq) and not node.children


def _as_iseq(node: ImmediateDiagram) -> ISeq:
    if isinstance(node, ISeq):
        return node
    direction = node.direction
    return ISeq(direction, (node,))


def align(imm: ImmediateDiagram, params: LayoutParams) -> ASeq:
    """Choose tip specifications and insert spaces; the root becomes a sequence.

    Vertical tips go only on positive blocks whose flush position the
    justification policy guarantees; spaces appear only at sequence ends
    inside blocks, never mid-sequence and never at the outermost ends.
    """
    return _align_seq(_as_iseq(imm), params, in_block=False)


def _align_seq(seq: ISeq, params: LayoutParams, in_block: bool) -> ASeq:
    direction = seq.direction
    children: list[AlignedDiagram] = [_align_child(c, params) for c in seq.children]

    if in_block and children:
        reading_first = 0 if direction is Direction.LTR else len(children) - 1
        reading_last = len(children) - 1 if direction is Direction.LTR else 0
        jc = params.justify_content
        s_side = start_side(direction)
        e_side = end_side(direction)
        first = children[reading_first]
        if (
            isinstance(first, ABlock)
            and first.polarity is Polarity.POSITIVE
            and jc in ("start", "space-between")
        ):
            children[reading_first] = _with_tip(first, s_side, VERTICAL)
        last = children[reading_last]
        if (
            isinstance(last, ABlock)
            and last.polarity is Polarity.POSITIVE
            and jc in ("end", "space-between")
        ):
            children[reading_last] = _with_tip(last, e_side, VERTICAL)

    if in_block:
        if not children:
            children = [Space(direction), Space(direction)]
        else:
            if not _collapsed_at(children, direction, at_start=True):
                _insert_reading(children, direction, Space(direction), at_start=True)
            if not _collapsed_at(children, direction, at_start=False):
                _insert_reading(children, direction, Space(direction), at_start=False)

    return ASeq(direction, LOGICAL_1, LOGICAL_1, tuple(children))


def _with_tip(block: ABlock, side: Side, ts: TipSpec) -> ABlock:
    if side is Side.LEFT:
        return replace(block, left_ts=ts)
    return replace(block, right_ts=ts)


def _collapsed_at(children: list[AlignedDiagram], direction: Direction, at_start: bool) -> bool:
    idx = 0 if (direction is Direction.LTR) == at_start else len(children) - 1
    side = start_side(direction) if at_start else end_side(direction)
    child = children[idx]
    return isinstance(child, ABlock) and isinstance(_aligned_tip(child, side), Vertical)


def _insert_reading(
    children: list[AlignedDiagram], direction: Direction, node: AlignedDiagram, at_start: bool
) -> None:
    if (direction is Direction.LTR) == at_start:
        children.insert(0, node)
    else:
        children.append(node)


def _align_child(node: ImmediateDiagram, params: LayoutParams) -> AlignedDiagram:
    if isinstance(node, Station):
        return node
    if isinstance(node, IBlock):
        return _align_block(node, params)
    if isinstance(node, ISeq):
        # Canonical diagrams have no sequence directly inside a sequence.
        raise ValueError("sequence nested in a sequence; canonicalize first")
    raise TypeError(f"not an immediate diagram: {node!r}")


def _align_block(block: IBlock, params: LayoutParams) -> ABlock:
    top = _align_seq(_as_iseq(block.top), params, in_block=True)
    bottom = _align_seq(_as_iseq(block.bottom), params, in_block=True)
    draft = ABlock(block.direction, LOGICAL_1, LOGICAL_1, block.polarity, top, bottom)
    top_eps = _is_epsilon_immediate(block.top)
    left = _policy_tip(draft, Side.LEFT, params.align_items, top_eps)
    right = _policy_tip(draft, Side.RIGHT, params.align_items, top_eps)
    return replace(draft, left_ts=left, right_ts=right)


# --- wrapped diagrams ---------------------------------------------------------


@dataclass(frozen=True)
class SeqWrap:
    """One wrap of a sequence: a single row, or rows of an eventual inline VC.

    ``spec`` holds the ascending wrap points (1-based child indices in reading
    order, always containing 1).  ``rows`` are stored in reading order, each
    row's items in visual order.
    """

    direction: Direction
    left_ts: TipSpec
    right_ts: TipSpec
    spec: tuple[int, ...]
    rows: tuple[tuple["WrappedDiagram", ...], ...]
    depth: int
    min_content: float
    max_content: float


@dataclass(frozen=True)
class WrapSet:
    """Ordered set of candidate wraps at one sequence position."""

    direction: Direction
    left_ts: TipSpec
    right_ts: TipSpec
    depth: int
    candidates: tuple[SeqWrap, ...]
    min_content: float
    max_content: float


@dataclass(frozen=True)
class WBlock:
    direction: Direction
    left_ts: TipSpec
    right_ts: TipSpec
    polarity: Polarity
    top: "WrappedDiagram"
    bottom: "WrappedDiagram"
    depth: int
    min_content: float
    max_content: float


WrappedDiagram = Union[Station, Space, SeqWrap, WrapSet, WBlock]


def item_min_content(item: WrappedDiagram, style: StyleConstants) -> float:
    if isinstance(item, Station):
        return style.station_width(item.label)
    if isinstance(item, Space):
        return 2 * style.s
    return item.min_content


def item_max_content(item: WrappedDiagram, style: StyleConstants) -> float:
    if isinstance(item, Station):
        return style.station_width(item.label)
    if isinstance(item, Space):
        return 2 * style.s
    return item.max_content


def min_content(term, params: LayoutParams) -> float:
    """Min-content width of a wrapped or aligned term."""
    if isinstance(term, (ASeq, ABlock)):
        term = local_wrap(term, params)
    return item_min_content(term, params.style)


def max_content(term, params: LayoutParams) -> float:
    """Max-content width of a wrapped or aligned term."""
    if isinstance(term, (ASeq, ABlock)):
        term = local_wrap(term, params)
    return item_max_content(term, params.style)


def _row_content(
    items: tuple[WrappedDiagram, ...], params: LayoutParams, use_max: bool
) -> float:
    measure = item_max_content if use_max else item_min_content
    total = sum(measure(item, params.style) for item in items)
    if len(items) > 1:
        total += params.gap * (len(items) - 1)
    return total


def _seq_bracketed(direction: Direction, ts: TipSpec, side: Side) -> bool:
    if isinstance(ts, Physical):
        exempt = 0.0 if side is start_side(direction) else 1.0
        return ts.proportion != exempt
    return True


def _wrap_fixed_width(
    direction: Direction, left_ts: TipSpec, right_ts: TipSpec, params: LayoutParams
) -> float:
    style = params.style
    fixed = style.marker_width(style.marker)
    for side, ts in ((Side.LEFT, left_ts), (Side.RIGHT, right_ts)):
        if _seq_bracketed(direction, ts, side):
            fixed += 3 * style.s
    return fixed


def _wrap_content(
    direction: Direction,
    left_ts: TipSpec,
    right_ts: TipSpec,
    rows: tuple[tuple[WrappedDiagram, ...], ...],
    params: LayoutParams,
    use_max: bool,
) -> float:
    if len(rows) == 1:
        return _row_content(rows[0], params, use_max)
    # Interior rows are narrower by the marker width in the eventual inline
    # VC, so they need that much more of the shared row width to fit.
    marker = params.style.marker_width(params.style.marker)
    widest = 0.0
    for i, row in enumerate(rows):
        w = _row_content(row, params, use_max)
        if 0 < i < len(rows) - 1:
            w += marker
        widest = max(widest, w)
    return widest + _wrap_fixed_width(direction, left_ts, right_ts, params)


def _make_seq_wrap(
    direction: Direction,
    left_ts: TipSpec,
    right_ts: TipSpec,
    spec: tuple[int, ...],
    reading_children: tuple[WrappedDiagram, ...],
    params: LayoutParams,
    depth: int,
) -> SeqWrap:
    bounds = list(spec[1:]) + [len(reading_children) + 1]
    rows = []
    lo = 1
    for hi in bounds:
        row = reading_children[lo - 1 : hi - 1]
        if direction is Direction.RTL:
            row = tuple(reversed(row))
        rows.append(tuple(row))
        lo = hi
    rows_t = tuple(rows)
    return SeqWrap(
        direction,
        left_ts,
        right_ts,
        spec,
        rows_t,
        depth,
        _wrap_content(direction, left_ts, right_ts, rows_t, params, use_max=False),
        _wrap_content(direction, left_ts, right_ts, rows_t, params, use_max=True),
    )


def _balanced_specs(
    reading_children: tuple[WrappedDiagram, ...], allowed: list[int], params: LayoutParams
) -> list[tuple[int, ...]]:
    """Fallback candidate specs when full enumeration would explode.

    One spec per row count: split so rows carry roughly equal min-content.
    """
    mins = [item_min_content(c, params.style) for c in reading_children]
    total = sum(mins)
    specs = {(1,), tuple([1] + allowed)}
    allowed_set = set(allowed)
    for rows in range(2, len(allowed) + 2):
        target = total / rows
        spec = [1]
        acc = 0.0
        for idx, m in enumerate(mins, start=1):
            if acc + m > target and idx in allowed_set and len(spec) < rows:
                spec.append(idx)
                acc = 0.0
            acc += m
        if len(spec) > 1:
            specs.add(tuple(spec))
    return sorted(specs)


def enumerate_sequence_wraps(
    seq: ASeq, params: LayoutParams, depth: int = 0
) -> tuple[SeqWrap, ...]:
    """All wraps of a sequence, in canonical (spec-lexicographic) order.

    Wrap points never isolate the connective spaces at sequence ends: a
    leading space stays on the first row, a trailing space on the last.
    Beyond ``params.max_free_points`` free points a balanced subset of
    candidates is generated instead of the full power set.
    """
    wrapped_children = tuple(local_wrap(c, params, depth + 1) for c in seq.children)
    reading = (
        wrapped_children
        if seq.direction is Direction.LTR
        else tuple(reversed(wrapped_children))
    )
    n = len(reading)
    allowed = [
        p
        for p in range(2, n + 1)
        if not (p == 2 and isinstance(reading[0], Space))
        and not (p == n and isinstance(reading[-1], Space))
    ]
    if len(allowed) <= params.max_free_points:
        specs = [
            tuple([1] + list(combo))
            for k in range(len(allowed) + 1)
            for combo in itertools.combinations(allowed, k)
        ]
        specs.sort()
    else:
        specs = _balanced_specs(reading, allowed, params)
    return tuple(
        _make_seq_wrap(seq.direction, seq.left_ts, seq.right_ts, spec, reading, params, depth)
        for spec in specs
    )


def local_wrap(node: AlignedDiagram, params: LayoutParams, depth: int = 0) -> WrappedDiagram:
    """Replace every sequence position by its ordered set of wraps."""
    if isinstance(node, (Station, Space)):
        return node
    if isinstance(node, ASeq):
        candidates = enumerate_sequence_wraps(node, params, depth)
        single = next(c for c in candidates if c.spec == (1,))
        return WrapSet(
            node.direction,
            node.left_ts,
            node.right_ts,
            depth,
            candidates,
            min(c.min_content for c in candidates),
            single.max_content,
        )
    if isinstance(node, ABlock):
        top = local_wrap(node.top, params, depth + 1)
        bottom = local_wrap(node.bottom, params, depth + 1)
        charges = sum(
            3 * params.style.s
            for ts in (node.left_ts, node.right_ts)
            if not isinstance(ts, Vertical)
        )
        return WBlock(
            node.direction,
            node.left_ts,
            node.right_ts,
            node.polarity,
            top,
            bottom,
            depth,
            max(item_min_content(top, params.style), item_min_content(bottom, params.style))
            + charges,
            max(item_max_content(top, params.style), item_max_content(bottom, params.style))
            + charges,
        )
    raise TypeError(f"not an aligned diagram: {node!r}")


def wrap_penalty(term: WrappedDiagram, order: WrapOrder) -> float:
    """Sum of per-sequence penalty terms over a set-free wrapped tree."""
    if isinstance(term, (Station, Space)):
        return 0.0
    if isinstance(term, SeqWrap):
        total = order.term_penalty(len(term.spec), term.depth)
        for row in term.rows:
            for item in row:
                total += wrap_penalty(item, order)
        return total
    if isinstance(term, WBlock):
        return wrap_penalty(term.top, order) + wrap_penalty(term.bottom, order)
    if isinstance(term, WrapSet):
        raise ValueError("wrap penalty is defined on decided wraps, not sets")
    raise TypeError(f"not a wrapped diagram: {term!r}")


# --- heights of decided wraps --------------------------------------------------


@dataclass(frozen=True)
class _VProfile:
    height: float
    tips: dict
    rows: dict


def _profile_row(items: tuple, style: StyleConstants) -> _VProfile:
    if not items:
        return _VProfile(0.0, {Side.LEFT: 0.0, Side.RIGHT: 0.0}, {s: (0.0,) for s in Side})
    profiles = [_vprofile(item, style) for item in items]
    offsets = [0.0]
    conn = profiles[0].tips[Side.RIGHT]
    for p in profiles[1:]:
        offsets.append(conn - p.tips[Side.LEFT])
        conn = offsets[-1] + p.tips[Side.RIGHT]
    top = min(offsets)
    bottom = max(off + p.height for off, p in zip(offsets, profiles))
    shift = -top
    tips = {
        Side.LEFT: profiles[0].tips[Side.LEFT] + offsets[0] + shift,
        Side.RIGHT: profiles[-1].tips[Side.RIGHT] + offsets[-1] + shift,
    }
    rows = {
        Side.LEFT: tuple(y + offsets[0] + shift for y in profiles[0].rows[Side.LEFT]),
        Side.RIGHT: tuple(y + offsets[-1] + shift for y in profiles[-1].rows[Side.RIGHT]),
    }
    return _VProfile(bottom - top, tips, rows)


def _resolve_tip(ts: TipSpec, rows: tuple[float, ...]) -> float:
    if isinstance(ts, Logical):
        idx = min(max(ts.row, 1), len(rows)) - 1
        return rows[idx]
    if isinstance(ts, Physical):
        return rows[0] + (rows[-1] - rows[0]) * ts.proportion
    return rows[0]


def _vprofile(term, style: StyleConstants) -> _VProfile:
    if isinstance(term, Station):
        mid = style.station_height / 2
        return _VProfile(
            style.station_height,
            {Side.LEFT: mid, Side.RIGHT: mid},
            {s: (mid,) for s in Side},
        )
    if isinstance(term, Space):
        return _VProfile(0.0, {Side.LEFT: 0.0, Side.RIGHT: 0.0}, {s: (0.0,) for s in Side})
    if isinstance(term, SeqWrap):
        row_profiles = [_profile_row(row, style) for row in term.rows]
        if len(row_profiles) == 1:
            inner = row_profiles[0]
        else:
            height = sum(p.height for p in row_profiles) + style.row_gap * (
                len(row_profiles) - 1
            )
            offsets = []
            y = 0.0
            for p in row_profiles:
                offsets.append(y)
                y += p.height + style.row_gap
            start = start_side(term.direction)
            rows = {}
            rows[start] = tuple(t + offsets[0] for t in row_profiles[0].rows[start])
            rows[start.opposite()] = tuple(
                t + offsets[-1] for t in row_profiles[-1].rows[start.opposite()]
            )
            inner = _VProfile(
                height,
                {
                    start: row_profiles[0].tips[start] + offsets[0],
                    start.opposite(): row_profiles[-1].tips[start.opposite()] + offsets[-1],
                },
                rows,
            )
        left_tip = _resolve_tip(
            term.left_ts if len(term.rows) > 1 else LOGICAL_1, inner.rows[Side.LEFT]
        )
        right_tip = _resolve_tip(
            term.right_ts if len(term.rows) > 1 else LOGICAL_1, inner.rows[Side.RIGHT]
        )
        return _VProfile(
            inner.height,
            {Side.LEFT: left_tip, Side.RIGHT: right_tip},
            {Side.LEFT: (left_tip,), Side.RIGHT: (right_tip,)},
        )
    if isinstance(term, WBlock):
        tp = _vprofile(term.top, style)
        bp = _vprofile(term.bottom, style)
        off = tp.height + style.row_gap
        height = off + bp.height
        tips = {}
        rows = {}
        for side in Side:
            if term.polarity is Polarity.POSITIVE:
                internal = tp.rows[side] + tuple(y + off for y in bp.rows[side])
            else:
                internal = (tp.rows[side][0],) + tuple(y + off for y in bp.rows[side])
            ts = term.left_ts if side is Side.LEFT else term.right_ts
            if isinstance(ts, Vertical):
                tips[side] = internal[0]
                rows[side] = internal
            else:
                tips[side] = _resolve_tip(ts, internal)
                rows[side] = (tips[side],)
        return _VProfile(height, tips, rows)
    raise TypeError(f"height needs a decided wrap, got {term!r}")


def global_height(term: WrappedDiagram, style: StyleConstants) -> float:
    """Height of a decided (set-free) wrap tree."""
    return _vprofile(term, style).height


# --- global wrapping ------------------------------------------------------------


def _collect_wrap_sets(term: WrappedDiagram, out: list[WrapSet]) -> None:
    if isinstance(term, WrapSet):
        out.append(term)
        # All candidates share child nodes, so one candidate suffices to
        # discover nested sets.
        probe = term.candidates[0]
        for row in probe.rows:
            for item in row:
                _collect_wrap_sets(item, out)
    elif isinstance(term, SeqWrap):
        for row in term.rows:
            for item in row:
                _collect_wrap_sets(item, out)
    elif isinstance(term, WBlock):
        _collect_wrap_sets(term.top, out)
        _collect_wrap_sets(term.bottom, out)


def collect_wrap_sets(term: WrappedDiagram) -> list[WrapSet]:
    out: list[WrapSet] = []
    _collect_wrap_sets(term, out)
    return out


def resolve_wraps(term: WrappedDiagram, choice: dict[int, SeqWrap], params: LayoutParams):
    """Materialize a set-free tree given a choice per WrapSet (keyed by id)."""
    if isinstance(term, (Station, Space)):
        return term
    if isinstance(term, WrapSet):
        return resolve_wraps(choice[id(term)], choice, params)
    if isinstance(term, SeqWrap):
        rows = tuple(
            tuple(resolve_wraps(item, choice, params) for item in row) for row in term.rows
        )
        lo = _wrap_content(term.direction, term.left_ts, term.right_ts, rows, params, False)
        hi = _wrap_content(term.direction, term.left_ts, term.right_ts, rows, params, True)
        return replace(term, rows=rows, min_content=lo, max_content=hi)
    if isinstance(term, WBlock):
        top = resolve_wraps(term.top, choice, params)
        bottom = resolve_wraps(term.bottom, choice, params)
        charges = sum(
            3 * params.style.s
            for ts in (term.left_ts, term.right_ts)
            if not isinstance(ts, Vertical)
        )
        lo = max(item_min_content(top, params.style), item_min_content(bottom, params.style))
        hi = max(item_max_content(top, params.style), item_max_content(bottom, params.style))
        return replace(term, top=top, bottom=bottom, min_content=lo + charges, max_content=hi + charges)
    raise TypeError(f"not a wrapped diagram: {term!r}")


class _BoundsEvaluator:
    """(content_lo, content_hi, penalty_lo) bounds under partial choices.

    Free-subtree bounds are memoized once; evaluating a partial assignment
    only re-walks paths that contain a decided set.
    """

    def __init__(self, root: WrappedDiagram, params: LayoutParams):
        self.params = params
        self.sets_under: dict[int, frozenset[int]] = {}
        self.free: dict[int, tuple[float, float, float]] = {}
        self._analyze(root)

    def _analyze(self, term: WrappedDiagram) -> frozenset[int]:
        tid = id(term)
        if tid in self.sets_under:
            return self.sets_under[tid]
        ids: set[int] = set()
        if isinstance(term, WrapSet):
            ids.add(tid)
            for cand in term.candidates:
                ids |= self._analyze(cand)
        elif isinstance(term, SeqWrap):
            for row in term.rows:
                for item in row:
                    ids |= self._analyze(item)
        elif isinstance(term, WBlock):
            ids |= self._analyze(term.top)
            ids |= self._analyze(term.bottom)
        self.sets_under[tid] = frozenset(ids)
        self.free[tid] = self._compute(term, {})
        return self.sets_under[tid]

    def bounds(self, term: WrappedDiagram, choice: dict[int, SeqWrap]):
        cached = self.sets_under.get(id(term))
        if cached is not None and (not choice or not (cached & choice.keys())):
            return self.free[id(term)]
        return self._compute(term, choice)

    def _compute(self, term: WrappedDiagram, choice: dict[int, SeqWrap]):
        params = self.params
        style = params.style
        if isinstance(term, (Station, Space)):
            w = item_min_content(term, style)
            return w, w, 0.0
        if isinstance(term, WrapSet):
            chosen = choice.get(id(term))
            if chosen is not None:
                return self.bounds(chosen, choice)
            lo = hi = pen = None
            for cand in term.candidates:
                c_lo, c_hi, c_pen = self.bounds(cand, choice)
                lo = c_lo if lo is None else min(lo, c_lo)
                hi = c_hi if hi is None else max(hi, c_hi)
                pen = c_pen if pen is None else min(pen, c_pen)
            return lo, hi, pen
        if isinstance(term, SeqWrap):
            pen = params.order.term_penalty(len(term.spec), term.depth)
            marker = style.marker_width(style.marker)
            multi = len(term.rows) > 1
            lo_widest = hi_widest = 0.0
            for i, row in enumerate(term.rows):
                row_lo = row_hi = 0.0
                for item in row:
                    i_lo, i_hi, i_pen = self.bounds(item, choice)
                    row_lo += i_lo
                    row_hi += i_hi
                    pen += i_pen
                if len(row) > 1:
                    row_lo += params.gap * (len(row) - 1)
                    row_hi += params.gap * (len(row) - 1)
                if multi and 0 < i < len(term.rows) - 1:
                    row_lo += marker
                    row_hi += marker
                lo_widest = max(lo_widest, row_lo)
                hi_widest = max(hi_widest, row_hi)
            if multi:
                fixed = _wrap_fixed_width(term.direction, term.left_ts, term.right_ts, params)
                return lo_widest + fixed, hi_widest + fixed, pen
            return lo_widest, hi_widest, pen
        if isinstance(term, WBlock):
            t_lo, t_hi, t_pen = self.bounds(term.top, choice)
            b_lo, b_hi, b_pen = self.bounds(term.bottom, choice)
            charges = sum(
                3 * style.s
                for ts in (term.left_ts, term.right_ts)
                if not isinstance(ts, Vertical)
            )
            return max(t_lo, b_lo) + charges, max(t_hi, b_hi) + charges, t_pen + b_pen
        raise TypeError(f"not a wrapped diagram: {term!r}")


def _bounds(term: WrappedDiagram, choice: dict[int, SeqWrap], params: LayoutParams):
    """(content_lo, content_hi, penalty_lo) under a partial choice."""
    return _BoundsEvaluator(term, params).bounds(term, choice)


class _BudgetExceeded(Exception):
    pass


def global_wrap(
    lwd: WrappedDiagram, params: LayoutParams
) -> tuple[Optional[WrappedDiagram], bool]:
    """Least global wrap with content <= target, or (None, True) past budget.

    Lexicographic order: greater content, then lower wrap penalty, then lower
    height.  Weighted mode minimizes the configured linear combination.
    Exhaustive branch-and-bound; every expanded partial assignment counts
    against ``params.global_budget``.
    """
    target = params.target_width
    order = params.order
    evaluator = _BoundsEvaluator(lwd, params)
    lo, _, _ = evaluator.bounds(lwd, {})
    if lo > target + _EPS:
        raise NoFeasibleWrap(target, lo)

    positions = collect_wrap_sets(lwd)
    best: list = [None]
    expansions = [0]

    def better(a, b) -> bool:
        if order.mode == "weighted":
            return a[3] < b[3] - _EPS
        if a[0] > b[0] + _EPS:
            return True
        if a[0] < b[0] - _EPS:
            return False
        if a[1] < b[1] - _EPS:
            return True
        if a[1] > b[1] + _EPS:
            return False
        return a[2] < b[2] - _EPS

    def weighted_score(content: float, penalty: float, height: float) -> float:
        return (
            -order.content_weight * content
            + order.penalty_weight * penalty
            + order.height_weight * height
        )

    choice: dict[int, SeqWrap] = {}

    def search(i: int) -> None:
        expansions[0] += 1
        if expansions[0] > params.global_budget:
            raise _BudgetExceeded
        c_lo, c_hi, pen_lo = evaluator.bounds(lwd, choice)
        if c_lo > target + _EPS:
            return
        c_cap = min(c_hi, target)
        if best[0] is not None:
            if order.mode == "weighted":
                if weighted_score(c_cap, pen_lo, 0.0) > best[0][3] + _EPS:
                    return
            else:
                if c_cap < best[0][0] - _EPS:
                    return
                if abs(c_cap - best[0][0]) <= _EPS and pen_lo > best[0][1] + _EPS:
                    return
        if i == len(positions):
            resolved = resolve_wraps(lwd, choice, params)
            content = item_min_content(resolved, params.style)
            penalty = wrap_penalty(resolved, order)
            height = global_height(resolved, params.style)
            entry = (content, penalty, height, weighted_score(content, penalty, height), resolved)
            if best[0] is None or better(entry, best[0]):
                best[0] = entry
            return
        for cand in positions[i].candidates:
            choice[id(positions[i])] = cand
            search(i + 1)
        del choice[id(positions[i])]

    try:
        search(0)
    except _BudgetExceeded:
        return None, True
    if best[0] is None:
        raise NoFeasibleWrap(target, lo)
    return best[0][4], False


# --- justification ---------------------------------------------------------------


def distribute_widths(
    minima: list[float],
    maxima: list[float],
    is_concat: list[bool],
    target: float,
    gap: float,
    flex_absorb: float,
) -> tuple[list[float], float, list[tuple[float, float, tuple[float, ...]]]]:
    """Steps 1-4 of row justification.

    Returns the subwidths, the absorbed width, and a trace of
    (remaining, absorbed, subwidths) after each step; the invariant
    remaining + absorbed + sum(subwidths) == target holds at every entry.
    """
    n = len(minima)
    aw = gap * (n - 1) if n > 1 else 0.0
    sw = list(minima)
    rw = target - aw - sum(sw)
    if rw < 0:
        rw = 0.0 if rw > -1e-6 else rw  # tolerate float dust; larger deficits surface
    trace = [(rw, aw, tuple(sw))]

    growth = [mx - mn for mn, mx in zip(minima, maxima)]
    total_growth = sum(growth)
    mg = min(rw, total_growth)
    if mg > 0 and total_growth > 0:
        for i, g in enumerate(growth):
            sw[i] += mg * g / total_growth
        rw -= mg
    trace.append((rw, aw, tuple(sw)))

    absorbed = rw * flex_absorb
    aw += absorbed
    rw -= absorbed
    trace.append((rw, aw, tuple(sw)))

    concat_indices = [i for i, flag in enumerate(is_concat) if flag]
    if not concat_indices:
        aw += rw
    else:
        total_max = sum(maxima[i] for i in concat_indices)
        for i in concat_indices:
            share = maxima[i] / total_max if total_max > 0 else 1.0 / len(concat_indices)
            sw[i] += rw * share
    rw = 0.0
    trace.append((rw, aw, tuple(sw)))
    return sw, aw, trace


def _reading_slots(
    absorbed: float, n: int, gap: float, policy: str, pinned_start: bool, pinned_end: bool
) -> tuple[list[float], float]:
    """Rail widths before/between/after n items, in reading order.

    Returns (slots, leftover) where leftover is width that could not be
    placed because both edges are pinned with no interior slot; the caller
    hands it to the sole sublayout.
    """
    slots = [0.0] * (n + 1)
    for i in range(1, n):
        slots[i] = gap
    extra = absorbed - gap * (n - 1 if n > 1 else 0)
    if extra < 0:
        extra = 0.0
    if n == 0:
        slots[0] += extra
        return slots, 0.0
    if policy == "start":
        slots[n] += extra
    elif policy == "end":
        slots[0] += extra
    elif policy == "center":
        slots[0] += extra / 2
        slots[n] += extra / 2
    elif policy == "space-between":
        if n >= 2:
            for i in range(1, n):
                slots[i] += extra / (n - 1)
        else:
            slots[n] += extra
    elif policy == "space-around":
        part = extra / n
        slots[0] += part / 2
        slots[n] += part / 2
        for i in range(1, n):
            slots[i] += part
    elif policy == "space-evenly":
        part = extra / (n + 1)
        for i in range(n + 1):
            slots[i] += part
    else:
        raise ValueError(f"unknown justify-content policy {policy!r}")

    leftover = 0.0
    if pinned_start and slots[0] > 0:
        moved = slots[0]
        slots[0] = 0.0
        if n >= 2:
            slots[1] += moved
        elif not pinned_end:
            slots[1] += moved
        else:
            leftover += moved
    if pinned_end and slots[n] > 0:
        moved = slots[n]
        slots[n] = 0.0
        if n >= 2:
            slots[n - 1] += moved
        elif not pinned_start:
            slots[0] += moved
        else:
            leftover += moved
    return slots, leftover


def _is_pinned(item: WrappedDiagram, side: Side) -> bool:
    """Edge items that must stay flush: spaces and collapsing stacks."""
    if isinstance(item, Space):
        return True
    if isinstance(item, WBlock):
        ts = item.left_ts if side is Side.LEFT else item.right_ts
        return isinstance(ts, Vertical)
    return False


def _justify_row(
    items: tuple[WrappedDiagram, ...],
    direction: Direction,
    target: float,
    params: LayoutParams,
    log: Optional[dict],
) -> HConcat:
    style = params.style
    if not items:
        return HConcat(direction, (Rail(direction, max(target, 0.0)),))
    reading = items if direction is Direction.LTR else tuple(reversed(items))
    minima = [item_min_content(i, style) for i in reading]
    maxima = [item_max_content(i, style) for i in reading]
    concat_flags = [isinstance(i, (SeqWrap, WrapSet, WBlock)) for i in reading]
    s_side = start_side(direction)
    e_side = end_side(direction)
    pinned_start = _is_pinned(reading[0], s_side)
    pinned_end = _is_pinned(reading[-1], e_side)
    both_pinned_sole = len(reading) == 1 and pinned_start and pinned_end
    flex_absorb = 0.0 if both_pinned_sole else params.flex_absorb
    sw, aw, _ = distribute_widths(
        minima, maxima, concat_flags, target, params.gap, flex_absorb
    )
    slots, leftover = _reading_slots(
        aw, len(reading), params.gap, params.justify_content, pinned_start, pinned_end
    )
    if leftover > 0:
        sw[0] += leftover

    parts: list[Layout] = []
    for i, item in enumerate(reading):
        if slots[i] > _EPS:
            parts.append(Rail(direction, slots[i]))
        parts.append(justify(item, sw[i], params, log))
    if slots[len(reading)] > _EPS:
        parts.append(Rail(direction, slots[len(reading)]))
    if direction is Direction.RTL:
        parts.reverse()
    return HConcat(direction, tuple(parts))


def select_wrap(wrap_set: WrapSet, target: float, order: WrapOrder) -> SeqWrap:
    """First wrap in the active order whose min-content fits the target."""
    ranked = sorted(wrap_set.candidates, key=lambda w: order.local_key(w, target))
    for cand in ranked:
        if cand.min_content <= target + 1e-6:
            return cand
    raise NoFeasibleWrap(target, wrap_set.min_content)


def justify(
    term: WrappedDiagram,
    target: float,
    params: LayoutParams,
    log: Optional[dict] = None,
) -> Layout:
    """Lower a wrapped diagram to a layout of exactly ``target`` width."""
    style = params.style
    if isinstance(term, (Station, Space)):
        return term
    if target < item_min_content(term, style) - 1e-6:
        raise TargetTooSmall(target, item_min_content(term, style))
    if isinstance(term, WrapSet):
        chosen = select_wrap(term, target, params.order)
        if log is not None:
            log[id(term)] = chosen
        return justify(chosen, target, params, log)
    if isinstance(term, SeqWrap):
        if len(term.rows) == 1:
            return _justify_row(term.rows[0], term.direction, target, params, log)
        fixed = _wrap_fixed_width(term.direction, term.left_ts, term.right_ts, params)
        marker = style.marker_width(style.marker)
        edge_width = target - fixed
        rows = []
        for i, row in enumerate(term.rows):
            row_target = edge_width if i in (0, len(term.rows) - 1) else edge_width - marker
            rows.append(_justify_row(row, term.direction, row_target, params, log))
        return VConcatInline(
            term.direction, term.left_ts, term.right_ts, style.marker, tuple(rows)
        )
    if isinstance(term, WBlock):
        charges = sum(
            3 * style.s for ts in (term.left_ts, term.right_ts) if not isinstance(ts, Vertical)
        )
        inner = target - charges
        return VConcatBlock(
            term.direction,
            term.left_ts,
            term.right_ts,
            term.polarity,
            justify(term.top, inner, params, log),
            justify(term.bottom, inner, params, log),
        )
    raise TypeError(f"not a wrapped diagram: {term!r}")


# --- the compilation pipeline ------------------------------------------------------


@dataclass
class CompileStats:
    min_content: float
    max_content: float
    chosen_content: float
    height: float
    wrap_penalty: float
    elapsed_ms: float
    degraded: bool


@dataclass
class CompileResult:
    layout: Layout
    stats: CompileStats


def compile_with_stats(d: Diagram, params: LayoutParams) -> CompileResult:
    import time

    t0 = time.perf_counter()
    params.validate()
    canon = canonicalize(d)
    imm = to_immediate(canon, Direction.LTR)
    aligned = align(imm, params)
    lwd = local_wrap(aligned, params)
    style = params.style
    minc = item_min_content(lwd, style)
    maxc = item_max_content(lwd, style)
    if params.target_width < minc - 1e-6:
        raise TargetTooSmall(params.target_width, minc)

    degraded = False
    resolved = None
    if params.wrap_mode == "global":
        resolved, degraded = global_wrap(lwd, params)

    log: dict[int, SeqWrap] = {}
    tree: WrappedDiagram = resolved if resolved is not None else lwd
    layout = justify(tree, params.target_width, params, log)

    if resolved is None:
        chosen = resolve_wraps(lwd, log, params)
    else:
        chosen = resolved
    elapsed = (time.perf_counter() - t0) * 1000.0
    stats = CompileStats(
        min_content=minc,
        max_content=maxc,
        chosen_content=item_min_content(chosen, style),
        height=global_height(chosen, style),
        wrap_penalty=wrap_penalty(chosen, params.order),
        elapsed_ms=elapsed,
        degraded=degraded,
    )
    return CompileResult(layout, stats)


def compile_diagram(d: Diagram, params: LayoutParams) -> Layout:
    """canonicalize -> immediate -> align -> wrap -> justify."""
    return compile_with_stats(d, params).layout


# --- intermediate-representation dumps ------------------------------------------------


def print_immediate(node: ImmediateDiagram) -> str:
    if isinstance(node, Station):
        flag = "#t" if node.terminal else "#f"
        return f'(station {node.direction} "{_sexpr.escape(node.label, chr(34))}" {flag})'
    if isinstance(node, ISeq):
        inner = "".join(" " + print_immediate(c) for c in node.children)
        return f"({node.direction}{inner})"
    if isinstance(node, IBlock):
        return (
            f"(vconcat-block {node.direction} {node.polarity} "
            f"{print_immediate(node.top)} {print_immediate(node.bottom)})"
        )
    raise TypeError(f"not an immediate diagram: {node!r}")


def _print_ts(ts: TipSpec) -> str:
    if isinstance(ts, Vertical):
        return "vertical"
    if isinstance(ts, Logical):
        return f"(logical {ts.row})"
    return f"(physical {_sexpr.format_number(ts.proportion)})"


def print_aligned(node: AlignedDiagram) -> str:
    if isinstance(node, Station):
        return print_immediate(node)
    if isinstance(node, Space):
        return f"(space {node.direction})"
    if isinstance(node, ASeq):
        inner = "".join(" " + print_aligned(c) for c in node.children)
        return f"({node.direction} {_print_ts(node.left_ts)} {_print_ts(node.right_ts)}{inner})"
    if isinstance(node, ABlock):
        return (
            f"(vconcat-block {node.direction} {_print_ts(node.left_ts)} "
            f"{_print_ts(node.right_ts)} {node.polarity} "
            f"{print_aligned(node.top)} {print_aligned(node.bottom)})"
        )
    raise TypeError(f"not an aligned diagram: {node!r}")


def print_wrapped(node: WrappedDiagram, style: StyleConstants | None = None) -> str:
    style = style or StyleConstants()
    if isinstance(node, Station):
        return print_immediate(node)
    if isinstance(node, Space):
        return f"(space {node.direction})"
    if isinstance(node, WrapSet):
        inner = "".join(" " + print_wrapped(c, style) for c in node.candidates)
        return f"(set{inner})"
    if isinstance(node, SeqWrap):
        rows = [
            f"(hconcat {node.direction}"
            + "".join(" " + print_wrapped(item, style) for item in row)
            + ")"
            for row in node.rows
        ]
        if len(rows) == 1:
            return rows[0]
        marker = '"' + _sexpr.escape(style.marker, '"') + '"'
        return (
            f"(vconcat-inline {node.direction} {_print_ts(node.left_ts)} "
            f"{_print_ts(node.right_ts)} {marker} " + " ".join(rows) + ")"
        )
    if isinstance(node, WBlock):
        return (
            f"(vconcat-block {node.direction} {_print_ts(node.left_ts)} "
            f"{_print_ts(node.right_ts)} {node.polarity} "
            f"{print_wrapped(node.top, style)} {print_wrapped(node.bottom, style)})"
        )
    raise TypeError(f"not a wrapped diagram: {node!r}")
