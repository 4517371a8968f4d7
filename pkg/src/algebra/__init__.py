"""
Step-function model of the test-function algebra L2 ∩ L∞.
"""

from src.algebra.step_function import (
    Cell,
    Refinement,
    StepFunction,
    common_refinement,
    conj,
    inner,
    inner_pow,
    mul,
    norm_inf,
    norm_p,
    overlap_matrix,
    pointwise,
    power,
    refine_cells,
)

__all__ = [
    "Cell",
    "Refinement",
    "StepFunction",
    "common_refinement",
    "conj",
    "inner",
    "inner_pow",
    "mul",
    "norm_inf",
    "norm_p",
    "overlap_matrix",
    "pointwise",
    "power",
    "refine_cells",
]
