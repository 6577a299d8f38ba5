"""
Unit tests for the expression lexer and parser.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.cli.grammar import END, parse_expr, tokenize
from src.core.exceptions import InvalidIndexError, ParseError
from src.expr.nodes import (
    IMAG_UNIT,
    ONE,
    W_MAP,
    ZETA,
    Add,
    Conj,
    Const,
    Exp,
    Hkm,
    IntPow,
    Inv,
    Log,
    Mul,
)
from src.expr.printer import to_source


class TestTokenize:
    """Tests for the lexer."""

    def test_tokens_and_offsets(self):
        """Whitespace is dropped; offsets index the source."""
        tokens = tokenize("exp( -i*zeta )")
        assert [t.text for t in tokens] == ["exp", "(", "-", "i", "*", "zeta", ")", ""]
        assert [t.offset for t in tokens] == [0, 3, 5, 6, 7, 8, 13, 14]
        assert tokens[-1].kind == "end"

    def test_numbers_with_exponents(self):
        """Scientific notation is a single number token."""
        tokens = tokenize("1.5e-3*W")
        assert tokens[0].kind == "number"
        assert tokens[0].text == "1.5e-3"

    def test_unknown_character_reports_byte_offset(self):
        """Offsets count UTF-8 bytes, not code points."""
        with pytest.raises(ParseError) as exc_info:
            tokenize("é+$")
        assert exc_info.value.offset == 0
        with pytest.raises(ParseError) as exc_info:
            parse_expr("W+é")
        assert exc_info.value.offset == 2


class TestParse:
    """Tests for parse_expr."""

    @pytest.mark.parametrize(
        "src,expected",
        [
            ("zeta", ZETA),
            ("W", W_MAP),
            ("i", IMAG_UNIT),
            ("2", Const(2.0)),
            ("h(1/2)", Hkm(1, 2)),
            ("h(-2/3)", Hkm(-2, 3)),
            ("h(0/4)", ONE),
            ("W+zeta", Add(W_MAP, ZETA)),
            ("W-zeta", Add(W_MAP, Mul(Const(-1.0), ZETA))),
            ("W/zeta", Mul(W_MAP, Inv(ZETA))),
            ("-2", Const(-2.0)),
            ("-i*zeta", Mul(Const(-1j), ZETA)),
            ("W^-2", IntPow(W_MAP, -2)),
            ("exp(-i*zeta)", Exp(Mul(Const(-1j), ZETA))),
            ("log(h(1/3))", Log(Hkm(1, 3))),
            ("conj(W)", Conj(W_MAP)),
            ("inv(W)", Inv(W_MAP)),
        ],
    )
    def test_parses(self, src, expected):
        """Atoms, operators and functions build the expected trees."""
        assert parse_expr(src) == expected

    def test_precedence(self):
        """* binds tighter than +, ^ tighter than unary minus."""
        assert parse_expr("W+zeta*W") == Add(W_MAP, Mul(ZETA, W_MAP))
        assert parse_expr("-W^2") == Mul(Const(-1.0), IntPow(W_MAP, 2))

    def test_left_associative(self):
        """a - b - c groups as (a - b) - c."""
        tree = parse_expr("W-zeta-W")
        assert isinstance(tree, Add)
        assert tree.left == Add(W_MAP, Mul(Const(-1.0), ZETA))


class TestParseErrors:
    """Tests for error offsets and expected sets."""

    def test_trailing_token(self):
        """Input after a complete expression lists the continuations."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("W zeta")
        err = exc_info.value
        assert err.offset == 2
        assert END in err.expected
        assert "+" in err.expected
        assert err.exit_code == 2

    def test_unexpected_end(self):
        """A dangling operator reports the end-of-input offset."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("W+")
        assert exc_info.value.offset == 2
        assert "zeta" in exc_info.value.expected

    def test_unclosed_paren(self):
        """A missing ')' is named in the expected set."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("exp(W")
        assert exc_info.value.expected == [")"]

    def test_non_integer_power(self):
        """Exponents are integers only."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("W^1.5")
        assert exc_info.value.offset == 2

    def test_unknown_name(self):
        """Identifiers outside the language are rejected at their offset."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("W*sin(zeta)")
        assert exc_info.value.offset == 2

    def test_invalid_family_index_carries_offset(self):
        """h(3/2) is a well-formed token sequence with an invalid index."""
        with pytest.raises(InvalidIndexError) as exc_info:
            parse_expr("W*h(3/2)")
        assert exc_info.value.offset == 2
        assert exc_info.value.exit_code == 2

    def test_oversized_integer_exponent(self):
        """A 5000-digit exponent is a parse error at the literal, not a ValueError."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("W^" + "1" * 5000)
        assert exc_info.value.offset == 2
        assert exc_info.value.expected == ["integer"]

    def test_oversized_family_index(self):
        """h(k/m) indices go through the same integer rule."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("h(" + "1" * 5000 + "/2)")
        assert exc_info.value.offset == 2

    def test_number_overflowing_a_float(self):
        """A constant too large for a float is rejected where it starts."""
        with pytest.raises(ParseError) as exc_info:
            parse_expr("W+" + "9" * 400)
        assert exc_info.value.offset == 2
        assert exc_info.value.expected == ["number"]


# =============================================================================
# Round trip
# =============================================================================

_leaves = st.sampled_from(["zeta", "W", "i", "2", "0.5", "h(1/2)", "h(-2/3)", "h(3/4)"])


def _extend(children: st.SearchStrategy[str]) -> st.SearchStrategy[str]:
    binary = st.tuples(children, st.sampled_from(["+", "-", "*", "/"]), children).map(
        lambda t: f"({t[0]}{t[1]}{t[2]})"
    )
    unary = st.tuples(st.sampled_from(["exp", "log", "inv", "conj"]), children).map(
        lambda t: f"{t[0]}({t[1]})"
    )
    power = st.tuples(children, st.integers(min_value=-3, max_value=3)).map(
        lambda t: f"({t[0]})^{t[1]}"
    )
    negated = children.map(lambda c: f"-{c}")
    return binary | unary | power | negated


sources = st.recursive(_leaves, _extend, max_leaves=8)


class TestRoundTrip:
    """Parsed trees survive printing and reparsing."""

    @given(src=sources)
    @settings(max_examples=200, deadline=None)
    def test_parse_print_parse(self, src):
        """parse(to_source(parse(s))) == parse(s)."""
        tree = parse_expr(src)
        assert parse_expr(to_source(tree)) == tree
