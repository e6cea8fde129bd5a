"""Cross-axis alignment and main-axis justification, flexbox style.

align-items decides which internal row of a stack sits on the through-line
(and when a nested stack may collapse its bracket into its container's);
justify-content decides where spare width goes within each row.
"""

from pathlib import Path

from railyard import LayoutParams, compile_diagram, parse_diagram, render_svg
from railyard.pipeline import align, print_aligned, to_immediate
from railyard.diagram import canonicalize

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

optional = parse_diagram('("fetch" (+ () "eagerly") "rows")')

print("tip specifications chosen per alignment policy:")
for policy in ("top", "center", "bottom", "baseline"):
    params = LayoutParams(target_width=400, align_items=policy)
    aligned = align(to_immediate(canonicalize(optional)), params)
    block = aligned.children[1]
    print(f"  {policy:9} -> left {block.left_ts} right {block.right_ts}")
    layout = compile_diagram(optional, params)
    (OUT / f"align_{policy}.svg").write_text(render_svg(layout), encoding="utf-8")

print("\njustification of spare width (target 420):")
for policy in ("start", "end", "center", "space-between", "space-around", "space-evenly"):
    params = LayoutParams(target_width=420, justify_content=policy)
    layout = compile_diagram(optional, params)
    kinds = [type(c).__name__ for c in layout.children]
    print(f"  {policy:14} row children: {kinds}")
    (OUT / f"justify_{policy.replace('-', '_')}.svg").write_text(
        render_svg(layout), encoding="utf-8"
    )

# Collapsing: under start-justification a leading nested stack shares its
# container's bracket (a vertical tip); space-evenly forbids it because a
# rail could be inserted between them.
nested = parse_diagram('(+ ((+ "a" "b") "x") "y")')
for policy in ("start", "space-evenly"):
    params = LayoutParams(target_width=420, justify_content=policy)
    aligned = align(to_immediate(canonicalize(nested)), params)
    print(f"\naligned tree under justify={policy}:")
    print(" ", print_aligned(aligned))
