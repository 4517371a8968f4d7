"""
Quadratic exponential-vector kernel.

Closed form of the scalar product between two quadratic exponential vectors,

    ⟨Ψ(f), Ψ(g)⟩ = exp(-(c/2) ∫ Log(1 - 4 conj(f(s)) g(s)) ds),

the existence test ‖f‖∞ < 1/2, Gram assembly, and the Taylor coefficients of
t ↦ ⟨Ψ(tf), Ψ(g)⟩.
"""

from typing import List, NamedTuple, Sequence

import numpy as np

from src.algebra.step_function import StepFunction, inner_pow, norm_inf, overlap_matrix
from src.linalg.hermitian import HermitianMatrix
from src.utils.errors import DimensionMismatch, DomainError, NumericOverflow
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

EXISTENCE_RADIUS = 0.5
# Largest real part of a logarithm whose exponential is a finite double
MAX_LOG = float(np.log(np.finfo(float).max))


class CouplingConstant(float):
    """The positive constant c of the commutation relations."""

    def __new__(cls, c):
        value = float(c)
        if not np.isfinite(value) or value <= 0.0:
            raise DomainError("coupling constant must be positive", {"c": value})
        return super().__new__(cls, value)


class KernelValue(NamedTuple):
    value: complex
    log_value: complex


class GramMatrix(HermitianMatrix):
    """Hermitian matrix of kernel values ⟨Ψ(f_i), Ψ(f_j)⟩."""

    def __init__(self, entries):
        super().__init__(entries, rtol=1e-13)

    @property
    def hermitian(self) -> bool:
        return True


def qexp_exists(f: StepFunction) -> bool:
    """Ψ(f) exists iff ‖f‖∞ < 1/2 (strict)"""
    return norm_inf(f) < EXISTENCE_RADIUS


def require_admissible(f: StepFunction, name: str) -> None:
    if not qexp_exists(f):
        raise DomainError(
            f"exponential vector of {name} does not exist: ‖{name}‖∞ >= 1/2",
            {"argument": name, "norm_inf": norm_inf(f)},
        )


def log_kernel(f: StepFunction, g: StepFunction, c: float) -> complex:
    """
    -(c/2) Σ |I ∩ J| Log(1 - 4 conj(f_I) g_J) over overlapping cells.

    Raises:
        DomainError: if either function is outside the existence radius
        DimensionMismatch: if the dimensions differ
    """
    c = CouplingConstant(c)
    if f.dimension != g.dimension:
        raise DimensionMismatch("dimension mismatch", {"left": f.dimension, "right": g.dimension})
    require_admissible(f, "f")
    require_admissible(g, "g")

    overlap = overlap_matrix(f, g)
    mask = overlap > 0.0
    if not np.any(mask):
        return 0j
    arg = 1.0 - 4.0 * np.conj(f.values)[:, None] * g.values[None, :]
    arg = arg[mask]
    # |4 conj(u) v| < 1, so 1 - 4 conj(u) v lies in the disk of radius 1 around 1
    assert np.all(arg.real > 0.0), "kernel argument left the right half-plane"
    return complex(-0.5 * c * np.sum(overlap[mask] * np.log(arg)))


def kernel(f: StepFunction, g: StepFunction, c: float) -> KernelValue:
    """
    Scalar product ⟨Ψ(f), Ψ(g)⟩ together with its principal logarithm.

    Args:
        f: first (conjugated) argument
        g: second argument
        c: coupling constant

    Returns:
        KernelValue(value, log_value)

    Raises:
        DomainError: if ‖f‖∞ >= 1/2 or ‖g‖∞ >= 1/2
        NumericOverflow: if the value exceeds double range
    """
    log_value = log_kernel(f, g, c)
    if log_value.real > MAX_LOG:
        raise NumericOverflow("kernel value exceeds double range", {"log_value_re": log_value.real})
    return KernelValue(complex(np.exp(log_value)), log_value)


def kernel_gram(fs: Sequence[StepFunction], c: float) -> GramMatrix:
    """
    Gram matrix (⟨Ψ(f_i), Ψ(f_j)⟩)_{ij}.

    Entries are exp(log) per entry; the lower triangle is the conjugate of
    the upper one.

    Raises:
        DomainError: naming the index of the first inadmissible function
    """
    c = CouplingConstant(c)
    for i, f in enumerate(fs):
        if not qexp_exists(f):
            raise DomainError(
                f"function {i} is outside the existence radius",
                {"index": i, "norm_inf": norm_inf(f)},
            )
    n = len(fs)
    entries = np.zeros((n, n), dtype=complex)
    for i in range(n):
        entries[i, i] = kernel(fs[i], fs[i], c).value.real
        for j in range(i + 1, n):
            value = kernel(fs[i], fs[j], c).value
            entries[i, j] = value
            entries[j, i] = np.conj(value)
    logger.debug(f"Assembled {n}x{n} Gram matrix at c={float(c)}")
    return GramMatrix(entries)


def kernel_taylor_coefficients(f: StepFunction, g: StepFunction, c: float, n_max: int) -> List[complex]:
    """
    Coefficients a_0..a_N of t ↦ ⟨Ψ(tf), Ψ(g)⟩ = Σ a_n t^n.

    The exponent is the power series φ(t) = Σ_k (c/2)(4^k/k)⟨f^k, g^k⟩ t^k and
    the coefficients of exp(φ) follow from n a_n = Σ_k k φ_k a_{n-k}.
    The expansion is formal, so no radius check is made.
    """
    c = CouplingConstant(c)
    if f.dimension != g.dimension:
        raise DimensionMismatch("dimension mismatch", {"left": f.dimension, "right": g.dimension})
    phi = [0j] + [0.5 * c * 4.0 ** k / k * inner_pow(f, g, k) for k in range(1, n_max + 1)]
    coefficients = [1.0 + 0j]
    for n in range(1, n_max + 1):
        total = sum(k * phi[k] * coefficients[n - k] for k in range(1, n + 1))
        coefficients.append(total / n)
    return coefficients
