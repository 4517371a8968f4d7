"""
Error types shared by every component.

Each error carries a machine-readable ``kind`` and a ``details`` dict so the
command-line front end can serialize it as structured JSON.
"""

from typing import Any, Dict, Optional


class QFockError(Exception):
    """Base class for all toolkit errors."""

    kind = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Structured form used by the CLI error channel"""
        return {
            "status": "error",
            "kind": self.kind,
            "error": self.message,
            "details": self.details,
        }


class DimensionMismatch(QFockError):
    kind = "dimension_mismatch"


class InvalidCell(QFockError):
    kind = "invalid_cell"


class OverlappingCells(QFockError):
    kind = "overlapping_cells"


class DomainError(QFockError):
    """Raised outside the existence radius or another admissible domain."""

    kind = "domain"


class NumericOverflow(QFockError):
    kind = "overflow"


class TailNotContracting(QFockError):
    kind = "tail_not_contracting"


class UnmappedSupport(QFockError):
    kind = "unmapped_support"


class NotRepresentable(QFockError):
    kind = "not_representable"


class PreconditionFailed(QFockError):
    kind = "precondition_failed"


class ConvergenceFailure(QFockError):
    kind = "convergence_failure"


class SchemaError(QFockError):
    """Rejected JSON input; treated as a usage error by the CLI."""

    kind = "schema"


class NotHermitian(QFockError):
    kind = "not_hermitian"


class InvalidOperator(QFockError):
    """Operator description violates a variant invariant."""

    kind = "invalid_operator"
