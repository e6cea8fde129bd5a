"""From regular expressions and BNF grammars to diagrams to SVG."""

from pathlib import Path

from railyard import (
    LayoutParams,
    bnf_to_diagrams,
    compile_diagram,
    eliminate_empty,
    parse_bnf,
    parse_regex,
    print_diagram,
    regex_to_diagram,
    render_svg,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# Regular expressions: 0 is the empty language and must be rewritten away
# before drawing (r . 0 = 0, r | 0 = r, 0* = eps).
rx = parse_regex('"[" (eps | item ("," item)*) "]"')
d = regex_to_diagram(eliminate_empty(rx))
print("json list, regex:", print_diagram(d))
(OUT / "json_list_regex.svg").write_text(
    render_svg(compile_diagram(d, LayoutParams(target_width=430))), encoding="utf-8"
)

# BNF: one diagram per rule; <name> references another rule.
grammar = parse_bnf(
    """
    list  := [ <items> ]
    items :=
           | <item>
           | <item> , <items>
    """
)
for name, rule_diagram in bnf_to_diagrams(grammar):
    print(f"{name:6} :=", print_diagram(rule_diagram))
    layout = compile_diagram(rule_diagram, LayoutParams(target_width=430))
    (OUT / f"bnf_{name}.svg").write_text(render_svg(layout), encoding="utf-8")

print("\nwrote SVGs to", OUT)
