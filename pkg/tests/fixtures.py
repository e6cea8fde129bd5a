"""Shared fixtures: the SQL insert-statement shaped performance diagram."""

from railyard.diagram import parse_diagram

# 74 constructors: tokens, sequences, and stacks combined.
INSERT_STMT_SOURCE = """
(
 (+ () ("WITH" (+ () "RECURSIVE") (- [common-table-expression] ",")))
 (+ ("INSERT" (+ () ("OR" (+ "ABORT" (+ "FAIL" (+ "IGNORE" (+ "REPLACE" "ROLLBACK"))))))) "REPLACE")
 "INTO"
 (+ ([schema-name] ".") ())
 [table-name]
 (+ () ("AS" [alias]))
 (+ ("(" (- [column-name] ",") ")") ())
 (+ (("VALUES") (- ("(" (- [expr] ",") ")") (",")))
    (+ ([select-stmt]) ("DEFAULT" "VALUES")))
 (+ () ("RETURNING" (- [result-column] ",")))
)
"""

INSERT_STMT = parse_diagram(INSERT_STMT_SOURCE)
