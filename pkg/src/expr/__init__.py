"""Angular expression trees with exact second-order jets."""

from src.expr.evaluate import (
    evaluate,
    evaluate_jet,
    log_branch_hits,
    symbolic_d,
    symbolic_dbar,
)
from src.expr.jet import Jet2
from src.expr.nodes import (
    IMAG_UNIT,
    ONE,
    W_MAP,
    ZETA,
    Add,
    Conj,
    Const,
    Exp,
    Expr,
    Hkm,
    IntPow,
    Inv,
    Log,
    Mul,
    W,
    Zeta,
    abs_squared,
    as_expr,
    conj,
    const,
    hkm,
    imag_part,
    negate,
    real_part,
)

__all__ = [
    "Add",
    "Conj",
    "Const",
    "Exp",
    "Expr",
    "Hkm",
    "IMAG_UNIT",
    "IntPow",
    "Inv",
    "Jet2",
    "Log",
    "Mul",
    "ONE",
    "W",
    "W_MAP",
    "ZETA",
    "Zeta",
    "abs_squared",
    "as_expr",
    "conj",
    "const",
    "evaluate",
    "evaluate_jet",
    "hkm",
    "imag_part",
    "log_branch_hits",
    "negate",
    "real_part",
    "symbolic_d",
    "symbolic_dbar",
]
