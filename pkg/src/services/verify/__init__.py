"""Named checks, their grids and the suite runner."""

from src.services.verify.checks import (
    check_associated_solution,
    check_composition,
    check_cr,
    check_factorization,
    check_gradient_orthogonality,
    check_harmonicity,
    check_inverse_closure,
    check_margin_monotonicity,
    check_phi_integral,
    check_product_closure,
    check_random_holomorphy,
    check_schrodinger,
    check_unit_norm,
)
from src.services.verify.grid import grid_points
from src.services.verify.suite import run_suite

__all__ = [
    "check_associated_solution",
    "check_composition",
    "check_cr",
    "check_factorization",
    "check_gradient_orthogonality",
    "check_harmonicity",
    "check_inverse_closure",
    "check_margin_monotonicity",
    "check_phi_integral",
    "check_product_closure",
    "check_random_holomorphy",
    "check_schrodinger",
    "check_unit_norm",
    "grid_points",
    "run_suite",
]
