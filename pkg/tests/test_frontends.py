import itertools
import random

import pytest

from railyard.diagram import print_diagram
from railyard.frontends import (
    BnfSyntaxError,
    Concat,
    EMPTY,
    EPSILON_RE,
    EmptyLanguageError,
    Literal,
    Regex,
    RegexSyntaxError,
    RuleRef,
    Star,
    TerminalAtom,
    Union_,
    bnf_rule_to_diagram,
    eliminate_empty,
    parse_bnf,
    parse_regex,
    print_regex,
    regex_matches,
    regex_to_diagram,
    shortest_member_length,
)

ALPHABET = "abc"


def random_regex(rng: random.Random, depth: int) -> Regex:
    if depth <= 0:
        return rng.choice(
            [EMPTY, EPSILON_RE, Literal("a"), Literal("b"), Literal("c")]
        )
    kind = rng.choice(["concat", "union", "star", "leaf"])
    if kind == "leaf":
        return random_regex(rng, 0)
    if kind == "star":
        return Star(random_regex(rng, depth - 1))
    left = random_regex(rng, depth - 1)
    right = random_regex(rng, depth - 1)
    return Concat(left, right) if kind == "concat" else Union_(left, right)


def all_strings(max_len: int):
    for n in range(max_len + 1):
        for chars in itertools.product(ALPHABET, repeat=n):
            yield "".join(chars)


class TestParseRegex:
    def test_precedence(self):
        assert parse_regex("a b | c*") == Union_(
            Concat(Literal("a"), Literal("b")), Star(Literal("c"))
        )

    def test_eps(self):
        assert parse_regex("eps") == EPSILON_RE

    def test_zero(self):
        assert parse_regex("0") == EMPTY

    def test_dangling_operator(self):
        with pytest.raises(RegexSyntaxError):
            parse_regex("a |")

    def test_grouping_and_star(self):
        assert parse_regex("(a | b)*") == Star(Union_(Literal("a"), Literal("b")))

    def test_quoted_literal(self):
        assert parse_regex('"hello world"') == Literal("hello world")

    def test_offset_reported(self):
        with pytest.raises(RegexSyntaxError) as exc:
            parse_regex("a ) b")
        assert exc.value.offset == 2

    def test_print_parse_roundtrip_random(self):
        rng = random.Random(11)
        for _ in range(200):
            r = random_regex(rng, 4)
            assert parse_regex(print_regex(r)) == r


class TestEliminateEmpty:
    def test_concat_with_empty_is_empty(self):
        assert eliminate_empty(Concat(Literal("a"), EMPTY)) == EMPTY

    def test_union_with_empty_drops_it(self):
        assert eliminate_empty(Union_(Literal("a"), EMPTY)) == Literal("a")

    def test_star_of_empty_is_epsilon(self):
        assert eliminate_empty(Star(EMPTY)) == EPSILON_RE

    def test_no_empty_subterm_remains(self):
        rng = random.Random(23)

        def has_empty(r):
            if isinstance(r, (Concat, Union_)):
                return has_empty(r.left) or has_empty(r.right)
            if isinstance(r, Star):
                return has_empty(r.inner)
            return r == EMPTY

        for _ in range(300):
            r = eliminate_empty(random_regex(rng, 5))
            assert r == EMPTY or not has_empty(r)

    def test_language_preserved_small_strings(self):
        rng = random.Random(5)
        for _ in range(200):
            r = random_regex(rng, 4)
            r2 = eliminate_empty(r)
            for s in all_strings(3):
                assert regex_matches(r, s) == regex_matches(r2, s)

    def test_empty_detected_iff_language_empty(self):
        rng = random.Random(6)
        for _ in range(300):
            r = random_regex(rng, 5)
            oracle_empty = shortest_member_length(r) == float("inf")
            assert (eliminate_empty(r) == EMPTY) == oracle_empty


class TestRegexToDiagram:
    @pytest.mark.parametrize(
        "source,expected",
        [
            ("eps", "()"),
            ("a", '"a"'),
            ("a b", '("a" "b")'),
            ("a | b", '(+ "a" "b")'),
            ("a*", '(- () "a")'),
        ],
    )
    def test_translation_table(self, source, expected):
        d = regex_to_diagram(parse_regex(source))
        assert print_diagram(d) == expected

    def test_nested_translations_stay_literal(self):
        d = regex_to_diagram(parse_regex("a b | c*"))
        assert print_diagram(d) == '(+ ("a" "b") (- () "c"))'

    def test_empty_language_refused(self):
        with pytest.raises(EmptyLanguageError):
            regex_to_diagram(EMPTY)

    def test_token_multiset_matches_literals(self):
        rng = random.Random(40)

        def literals(r):
            if isinstance(r, Literal):
                return [r.symbol]
            if isinstance(r, (Concat, Union_)):
                return literals(r.left) + literals(r.right)
            if isinstance(r, Star):
                return literals(r.inner)
            return []

        def tokens(d):
            from railyard.diagram import Sequence, Stack, Terminal

            if isinstance(d, Terminal):
                return [d.label]
            if isinstance(d, Stack):
                return tokens(d.top) + tokens(d.bottom)
            if isinstance(d, Sequence):
                return [t for c in d.children for t in tokens(c)]
            return []

        from railyard.diagram import canonicalize

        for _ in range(200):
            r = eliminate_empty(random_regex(rng, 4))
            if r == EMPTY:
                continue
            d = regex_to_diagram(r)
            assert sorted(tokens(d)) == sorted(literals(r))
            # translation then canonicalization is idempotent
            assert canonicalize(canonicalize(d)) == canonicalize(d)


class TestParseBnf:
    def test_single_rule(self):
        g = parse_bnf("list := [ <items> ]")
        assert len(g.rules) == 1
        (rule,) = g.rules
        assert rule.name == "list"
        assert rule.alternatives == (
            (TerminalAtom("["), RuleRef("items"), TerminalAtom("]")),
        )

    def test_leading_bar_empty_alternative(self):
        g = parse_bnf("items := | <item>")
        assert g.rule("items").alternatives == ((), (RuleRef("item"),))

    def test_continuation_lines(self):
        g = parse_bnf(
            """
            items :=
                   | <item>
                   | <item> , <items>
            """
        )
        assert g.rule("items").alternatives == (
            (),
            (RuleRef("item"),),
            (RuleRef("item"), TerminalAtom(","), RuleRef("items")),
        )

    def test_duplicate_rule_name(self):
        with pytest.raises(BnfSyntaxError, match="duplicate"):
            parse_bnf("a := x\na := y")

    def test_empty_rhs_is_epsilon(self):
        assert parse_bnf("a :=").rule("a").alternatives == ((),)

    def test_dangling_bar_rejected(self):
        with pytest.raises(BnfSyntaxError):
            parse_bnf("a := x |")


class TestBnfToDiagram:
    @pytest.mark.parametrize(
        "rhs,expected",
        [
            ("a", '"a"'),
            ("<a>", "[a]"),
            ("r s", '("r" "s")'),
            ("r | s", '(+ "r" "s")'),
            ("", "()"),
        ],
    )
    def test_translation_table(self, rhs, expected):
        g = parse_bnf(f"rule := {rhs}")
        assert print_diagram(bnf_rule_to_diagram(g.rule("rule"))) == expected

    def test_mixed_alternative(self):
        g = parse_bnf("a := x <y>")
        assert print_diagram(bnf_rule_to_diagram(g.rule("a"))) == '("x" [y])'

    def test_alternatives_fold_right(self):
        g = parse_bnf("a := x | y | z")
        assert print_diagram(bnf_rule_to_diagram(g.rule("a"))) == '(+ "x" (+ "y" "z"))'

    def test_single_alternative_has_no_stack(self):
        from railyard.diagram import Stack

        g = parse_bnf("a := x y z <w>")

        def has_stack(d):
            if isinstance(d, Stack):
                return True
            return hasattr(d, "children") and any(has_stack(c) for c in d.children)

        assert not has_stack(bnf_rule_to_diagram(g.rule("a")))

    def test_json_list_grammar(self):
        g = parse_bnf(
            """
            list  := [ <items> ]
            items :=
                   | <item>
                   | <item> , <items>
            """
        )
        assert print_diagram(bnf_rule_to_diagram(g.rule("list"))) == '("[" [items] "]")'
        assert (
            print_diagram(bnf_rule_to_diagram(g.rule("items")))
            == '(+ () (+ [item] ([item] "," [items])))'
        )
