"""railyard: railroad-diagram layout as compilation.

Parse a diagram (or translate a regex / BNF grammar), compile it to a
well-formed layout of exactly the requested width, and render SVG::

    from railyard import parse_diagram, LayoutParams, compile_diagram, render_svg

    d = parse_diagram('("CREATE" (+ () "TEMP") "TABLE")')
    layout = compile_diagram(d, LayoutParams(target_width=420))
    svg = render_svg(layout)
"""

from .diagram import (
    Diagram,
    EPSILON,
    NonTerminal,
    Polarity,
    Sequence,
    Stack,
    Terminal,
    canonicalize,
    equivalent,
    parse_diagram,
    print_diagram,
)
from .frontends import (
    BnfGrammar,
    EmptyLanguageError,
    bnf_rule_to_diagram,
    bnf_to_diagrams,
    eliminate_empty,
    parse_bnf,
    parse_regex,
    regex_to_diagram,
)
from .layout import (
    Connectability,
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
    connectability,
    connectable_rows,
    diagram_of,
    logical_rows,
    parse_layout,
    print_layout,
    top_level_well_formed,
    well_formed,
    width,
)
from .pipeline import (
    LayoutParams,
    TargetTooSmall,
    WrapOrder,
    align,
    compile_diagram,
    compile_with_stats,
    global_wrap,
    justify,
    local_wrap,
    max_content,
    min_content,
    to_immediate,
)
from .render import RenderStyle, measure_station, render_svg

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
