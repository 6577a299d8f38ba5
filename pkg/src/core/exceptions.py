"""
Custom exceptions for sphere-cr.

Every error carries a machine-readable ``error_code`` and the CLI exit code
it maps to, so the command layer never has to inspect messages.
"""

from typing import Any, Dict, Iterable, Optional


class SphereCRError(Exception):
    """Base exception for all sphere-cr errors."""

    def __init__(
        self,
        message: str,
        error_code: str = "internal_error",
        exit_code: int = 1,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_code = error_code
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


# =============================================================================
# Domain Errors
# =============================================================================


class DomainError(SphereCRError):
    """Raised when a point or stencil leaves the cut domain."""

    def __init__(
        self,
        message: str = "Point outside the cut domain",
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(
            message=message,
            error_code="domain_error",
            exit_code=2,
            details=details,
        )


class SingularValueError(SphereCRError):
    """Raised when Inv, Log or a negative power meets a zero argument."""

    def __init__(
        self,
        message: str = "Singular value during evaluation",
        node: Optional[str] = None,
    ):
        details = {}
        if node:
            details["node"] = node
        super().__init__(
            message=message,
            error_code="singular_value",
            exit_code=3,
            details=details,
        )


class InvalidIndexError(SphereCRError):
    """Raised when (k, m) violates 1 <= |k| <= m - 1."""

    def __init__(
        self,
        message: str = "Invalid family index",
        k: Optional[int] = None,
        m: Optional[int] = None,
        offset: Optional[int] = None,
    ):
        details: Dict[str, Any] = {}
        if k is not None:
            details["k"] = k
        if m is not None:
            details["m"] = m
        if offset is not None:
            details["offset"] = offset
            message = f"offset {offset}: {message}"
        self.offset = offset
        super().__init__(
            message=message,
            error_code="invalid_index",
            exit_code=2,
            details=details,
        )


# =============================================================================
# Numerical Errors
# =============================================================================


class NoConvergenceError(SphereCRError):
    """Raised when an adaptive integrator exhausts its subdivision budget."""

    def __init__(
        self,
        message: str = "Quadrature did not converge",
        partial_value: float = float("nan"),
        error_estimate: float = float("inf"),
        evaluations: int = 0,
    ):
        self.partial_value = partial_value
        self.error_estimate = error_estimate
        self.evaluations = evaluations
        super().__init__(
            message=message,
            error_code="no_convergence",
            exit_code=3,
            details={
                "partial_value": partial_value,
                "error_estimate": error_estimate,
                "evaluations": evaluations,
            },
        )


class DegenerateSequenceError(SphereCRError):
    """Raised when a convergence-order fit has errors at the machine floor."""

    def __init__(self, message: str = "Errors at machine floor; order undefined"):
        super().__init__(
            message=message,
            error_code="degenerate_sequence",
            exit_code=3,
        )


# =============================================================================
# Verification Errors
# =============================================================================


class NotApplicableError(SphereCRError):
    """Raised by holomorphy gates; verify turns it into a report."""

    def __init__(self, message: str = "Input is not angular holomorphic"):
        super().__init__(
            message=message,
            error_code="not_applicable",
            exit_code=1,
        )


# =============================================================================
# Command-line Errors
# =============================================================================


class ParseError(SphereCRError):
    """Raised when an expression source does not match the grammar."""

    def __init__(
        self,
        message: str,
        offset: int,
        expected: Iterable[str] = (),
    ):
        self.offset = offset
        self.expected = sorted(set(expected))
        text = f"offset {offset}: {message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(
            message=text,
            error_code="parse_error",
            exit_code=2,
            details={"offset": offset, "expected": self.expected},
        )


class UsageError(SphereCRError):
    """Raised when CLI arguments are out of their documented ranges."""

    def __init__(self, message: str = "Invalid usage", field: Optional[str] = None):
        details = {}
        if field:
            details["field"] = field
        super().__init__(
            message=message,
            error_code="usage_error",
            exit_code=2,
            details=details,
        )
