"""
Quadratic exponential vectors: kernel, n-particle products and finite spans.
"""

from src.fock.kernel import CouplingConstant, GramMatrix, KernelValue, kernel, kernel_gram, qexp_exists
from src.fock.nparticle import inner_n, inner_n_partition, inner_n_recursive, series_kernel, tail_ratio
from src.fock.span import FockSpan, LoewnerReport, counterexample, gamma2_apply, loewner_leq, span_norm

__all__ = [
    "CouplingConstant",
    "FockSpan",
    "GramMatrix",
    "KernelValue",
    "LoewnerReport",
    "counterexample",
    "gamma2_apply",
    "inner_n",
    "inner_n_partition",
    "inner_n_recursive",
    "kernel",
    "kernel_gram",
    "loewner_leq",
    "qexp_exists",
    "series_kernel",
    "span_norm",
    "tail_ratio",
]
