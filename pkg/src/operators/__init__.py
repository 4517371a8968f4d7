"""
One-particle operators and the classification of their second quantization.
"""

from src.operators.classifier import Classification, classify, decompose_isometry, moment_isometry_check
from src.operators.spec import (
    Average,
    CellMap,
    Compose,
    Gauge,
    Mult,
    OperatorSpec,
    Rearrange,
    ScalarExp,
    apply,
    identity,
    is_well_defined_gamma2,
)

__all__ = [
    "Average",
    "CellMap",
    "Classification",
    "Compose",
    "Gauge",
    "Mult",
    "OperatorSpec",
    "Rearrange",
    "ScalarExp",
    "apply",
    "classify",
    "decompose_isometry",
    "identity",
    "is_well_defined_gamma2",
    "moment_isometry_check",
]
