"""The diagram language: terms, canonical forms, and equivalence.

A diagram says what connects to what, with no geometry at all.  Terminals
are quoted, nonterminals bracketed, sequences parenthesized, and stacks are
binary with a polarity: `+` branches downward (alternatives), `-` loops
back (repetition).
"""

from railyard import canonicalize, equivalent, parse_diagram, print_diagram

optional_comma = parse_diagram('(+ () ",")')
print("an optional comma:       ", print_diagram(optional_comma))

one_or_more = parse_diagram('(- [item] ",")')
print("comma-separated items:   ", print_diagram(one_or_more))

# Sequence grouping carries no meaning.  Splicing nested sequences gives a
# canonical form, and two diagrams are equivalent when those agree.
a = parse_diagram('("x" ("y" "z"))')
b = parse_diagram('(("x" "y") "z")')
print("\nsplice:", print_diagram(a), "->", print_diagram(canonicalize(a)))
print("equivalent grouping:", equivalent(a, b))

# Stacks are ordered; swapping branches changes the diagram.
print("ordered stacks:      ", equivalent(parse_diagram('(+ "a" "b")'), parse_diagram('(+ "b" "a")')))
