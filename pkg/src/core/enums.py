"""Core enumerations for sphere-cr."""
from enum import Enum


class CheckStatus(str, Enum):
    """Outcome of a single verification check."""

    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"
    NOT_APPLICABLE = "not_applicable"


class OutputFormat(str, Enum):
    """Report formats emitted by the command line."""

    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class Composition(str, Enum):
    """Holomorphic outer functions accepted by composition checks."""

    EXP = "exp"
    LOG = "log"
    INTPOW = "intpow"


class CheckFamily(str, Enum):
    """Check families scheduled by the suite runner."""

    CR = "cr"
    PRODUCT_CLOSURE = "product_closure"
    INVERSE_CLOSURE = "inverse_closure"
    COMPOSITION = "composition"
    HARMONICITY = "harmonicity"
    GRADIENT_ORTHOGONALITY = "gradient_orthogonality"
    FACTORIZATION = "factorization"
    PHI_INTEGRAL = "phi_integral"
    UNIT_NORM = "unit_norm"
    SCHRODINGER = "schrodinger"
    ASSOCIATED_SOLUTION = "associated_solution"
    RANDOM_HOLOMORPHY = "random_holomorphy"
    MARGIN_MONOTONICITY = "margin_monotonicity"
