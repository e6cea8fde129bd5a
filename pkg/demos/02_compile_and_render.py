"""Compile a diagram to a layout of an exact width, then render SVG.

The compiler guarantees three things about its output: it is well-formed,
its extracted diagram is equivalent to the input, and its width equals the
requested target exactly.  Rails absorb whatever width the content doesn't.
"""

from pathlib import Path

from railyard import (
    LayoutParams,
    compile_diagram,
    diagram_of,
    equivalent,
    parse_diagram,
    print_layout,
    render_svg,
    top_level_well_formed,
    width,
)
from railyard.layout import StyleConstants

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

d = parse_diagram('("CREATE" (+ () "TEMP") "TABLE" (+ ("IF" "NOT" "EXISTS") ()) [name])')

for target in (680, 460, 320):
    layout = compile_diagram(d, LayoutParams(target_width=target))
    style = StyleConstants()
    print(f"target {target}:")
    print("  well-formed:", top_level_well_formed(layout).ok)
    print("  width:      ", width(layout, style))
    print("  equivalent: ", equivalent(diagram_of(layout), d))
    path = OUT / f"create_table_{target}.svg"
    path.write_text(render_svg(layout), encoding="utf-8")
    print("  wrote       ", path)

# The layout itself is an s-expression you can inspect, store, or WF-check.
narrow = compile_diagram(d, LayoutParams(target_width=320))
print("\nlayout term (320 wide):")
print(print_layout(narrow, indent=2))
