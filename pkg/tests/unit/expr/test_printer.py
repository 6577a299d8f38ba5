"""
Unit tests for canonical source printing.
"""

import pytest

from src.expr.nodes import (
    IMAG_UNIT,
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


class TestToSource:
    """Tests for to_source."""

    @pytest.mark.parametrize(
        "expr,text",
        [
            (ZETA, "zeta"),
            (W_MAP, "W"),
            (Hkm(-1, 2), "h(-1/2)"),
            (IMAG_UNIT, "i"),
            (Const(-1j), "(-i)"),
            (Const(2.0), "2.0"),
            (Const(-0.5), "(-0.5)"),
            (Add(W_MAP, ZETA), "(W+zeta)"),
            (Mul(Const(2.0), W_MAP), "(2.0*W)"),
            (Inv(W_MAP), "inv(W)"),
            (Exp(Mul(Const(-1j), ZETA)), "exp(((-i)*zeta))"),
            (Log(Hkm(1, 3)), "log(h(1/3))"),
            (Conj(W_MAP), "conj(W)"),
            (IntPow(W_MAP, -2), "(W^-2)"),
        ],
    )
    def test_canonical_text(self, expr, text):
        """Every node prints fully parenthesized."""
        assert to_source(expr) == text

    def test_general_complex_constant(self):
        """Complex constants print as re + im*i."""
        assert to_source(Const(1.5 - 2j)) == "(1.5+(-2.0)*i)"

    def test_small_constants_use_repr(self):
        """Floats keep every digit."""
        assert to_source(Const(1e-05)) == "1e-05"
        assert to_source(Const(0.1)) == "0.1"
