"""Wrapping is choosing among all row splits of each sequence, by rank.

Every sequence of n children has 2^(n-1) wraps.  Locally, each sequence
picks the best fit for the width it is handed; globally, one search ranks
whole-diagram wraps by (content width desc, wrap penalty asc, height asc).
"""

from railyard import LayoutParams, canonicalize, parse_diagram
from railyard.pipeline import (
    align,
    collect_wrap_sets,
    compile_with_stats,
    enumerate_sequence_wraps,
    local_wrap,
    to_immediate,
)

d = parse_diagram('("alpha" "beta" "gamma" "delta")')
params = LayoutParams(target_width=260)

aligned = align(to_immediate(canonicalize(d)), params)
wraps = enumerate_sequence_wraps(aligned, params)
print("candidate wraps of a 4-child sequence:")
for w in wraps:
    print(f"  rows starting at {w.spec}: min {w.min_content:6.1f}  max {w.max_content:6.1f}")

print("\nscores at target 260 (overflow^2 + 10 * penalty, then max-content):")
for w in sorted(wraps, key=lambda w: params.order.local_key(w, 260)):
    score = params.order.local_key(w, 260)[0]
    feasible = "ok " if w.min_content <= 260 else "too wide"
    print(f"  {str(w.spec):14} score {score:9.1f}  {feasible}")

for target in (380, 260, 170):
    for mode in ("local", "global"):
        p = LayoutParams(target_width=target, wrap_mode=mode)
        stats = compile_with_stats(d, p).stats
        print(
            f"target {target:3} {mode:6}: content {stats.chosen_content:6.1f} "
            f"height {stats.height:5.1f} penalty {stats.wrap_penalty:4.0f}"
        )

# Sets nest: a stack branch holding a sequence wraps independently.
nested = parse_diagram('(+ ("a" "b" "c") [other])')
lwd = local_wrap(align(to_immediate(canonicalize(nested)), params), params)
print("\nwrap sets in", '(+ ("a" "b" "c") [other]):')
for ws in collect_wrap_sets(lwd):
    print(f"  depth {ws.depth}: {len(ws.candidates)} candidates")
