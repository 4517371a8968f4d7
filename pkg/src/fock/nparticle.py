"""
n-particle inner products ⟨B⁺ⁿ_f Φ, B⁺ⁿ_g Φ⟩.

Two independent combinatorial evaluations (a forward recursion and a sum
over integer partitions), series reconstruction of the kernel with a
rigorous geometric tail bound, and the one-step norm growth check.
"""

import math
from enum import Enum
from typing import Dict, Iterator, List, NamedTuple, Tuple

import numpy as np
from sympy.utilities.iterables import partitions

from src.algebra.step_function import StepFunction, inner_pow, norm_inf, norm_p
from src.fock.kernel import CouplingConstant, require_admissible
from src.utils.errors import DimensionMismatch, NumericOverflow, TailNotContracting
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

# Tail ratio above which the contraction is reported as slow
SLOW_CONTRACTION_RATIO = 0.95


class Method(str, Enum):
    RECURSION = "recursion"
    PARTITION_SUM = "partition"


class NParticleInner(NamedTuple):
    n: int
    value: complex
    method: Method


class TailBound(NamedTuple):
    truncation: int
    bound: float
    ratio_at_n: float

    @property
    def contracting(self) -> bool:
        return self.ratio_at_n < 1.0


class PartitionMultiset:
    """
    Integer partition of n stored as multiplicities {k: i_k} with Σ k·i_k = n.
    """

    __slots__ = ("_multiplicities", "_n")

    def __init__(self, multiplicities: Dict[int, int], n: int):
        clean = {int(k): int(i) for k, i in multiplicities.items() if i}
        if any(k < 1 or i < 0 for k, i in clean.items()):
            raise ValueError(f"invalid partition multiplicities: {multiplicities}")
        if sum(k * i for k, i in clean.items()) != n:
            raise ValueError(f"multiplicities {clean} do not sum to {n}")
        self._multiplicities = dict(sorted(clean.items()))
        self._n = int(n)

    @property
    def n(self) -> int:
        return self._n

    @property
    def multiplicities(self) -> Dict[int, int]:
        return dict(self._multiplicities)

    def items(self) -> Iterator[Tuple[int, int]]:
        return iter(self._multiplicities.items())

    def parts(self) -> Tuple[int, ...]:
        """Parts in decreasing order"""
        return tuple(k for k, i in sorted(self._multiplicities.items(), reverse=True) for _ in range(i))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartitionMultiset):
            return NotImplemented
        return self._n == other._n and self._multiplicities == other._multiplicities

    def __hash__(self) -> int:
        return hash((self._n, tuple(self._multiplicities.items())))

    def __repr__(self) -> str:
        return "PartitionMultiset(%r)" % (self._multiplicities,)


def enumerate_partitions(n: int) -> List[PartitionMultiset]:
    """
    All integer partitions of n, each exactly once, ordered
    lexicographically (descending) by their decreasing part sequence.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if n == 0:
        return [PartitionMultiset({}, 0)]
    result = [PartitionMultiset(dict(p), n) for p in partitions(n)]
    result.sort(key=lambda p: p.parts(), reverse=True)
    return result


def _check_dimension(f: StepFunction, g: StepFunction) -> None:
    if f.dimension != g.dimension:
        raise DimensionMismatch("dimension mismatch", {"left": f.dimension, "right": g.dimension})


def _moments(f: StepFunction, g: StepFunction, n: int) -> List[complex]:
    """[0, ⟨f,g⟩, ⟨f²,g²⟩, ..., ⟨fⁿ,gⁿ⟩]"""
    return [0j] + [inner_pow(f, g, k) for k in range(1, n + 1)]


def _check_finite(value: complex, n: int, method: Method) -> complex:
    if not np.isfinite(value):
        raise NumericOverflow(
            "n-particle inner product left double range", {"n": n, "method": method.value}
        )
    return value


def inner_n_sequence(f: StepFunction, g: StepFunction, c: float, n: int) -> List[complex]:
    """
    I(0), ..., I(n) by the forward recursion

        I(m+1) = c Σ_{k=0}^{m} 2^{2k+1} m!(m+1)!/((m-k)!)² ⟨f^{k+1}, g^{k+1}⟩ I(m-k),

    with the factorial ratio accumulated inside the k-loop.
    """
    c = CouplingConstant(c)
    _check_dimension(f, g)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    moments = _moments(f, g, n)
    values = [1.0 + 0j]
    for m in range(n):
        ratio = float(m + 1)
        total = 0j
        for k in range(m + 1):
            if k > 0:
                ratio *= float(m - k + 1) ** 2
            total += 2.0 ** (2 * k + 1) * ratio * moments[k + 1] * values[m - k]
        values.append(_check_finite(c * total, m + 1, Method.RECURSION))
    return values


def inner_n_recursive(f: StepFunction, g: StepFunction, c: float, n: int) -> NParticleInner:
    """⟨B⁺ⁿ_f Φ, B⁺ⁿ_g Φ⟩ by the forward recursion"""
    return NParticleInner(n, inner_n_sequence(f, g, c, n)[n], Method.RECURSION)


def inner_n(f: StepFunction, g: StepFunction, c: float, n: int) -> complex:
    return inner_n_recursive(f, g, c, n).value


def inner_n_partition(f: StepFunction, g: StepFunction, c: float, n: int) -> NParticleInner:
    """
    ⟨B⁺ⁿ_f Φ, B⁺ⁿ_g Φ⟩ as a sum over partitions {k: i_k} of n:

        (n!)² Π_k (1/i_k!) (2^{2k-1} c ⟨f^k, g^k⟩ / k)^{i_k}

    (the exponential formula applied to the kernel's logarithm).
    """
    c = CouplingConstant(c)
    _check_dimension(f, g)
    moments = _moments(f, g, n)
    total = 0j
    for partition in enumerate_partitions(n):
        term = 1.0 + 0j
        for k, i in partition.items():
            term *= (2.0 ** (2 * k - 1) * c * moments[k] / k) ** i / math.factorial(i)
        total += term
    value = float(math.factorial(n)) ** 2 * total
    return NParticleInner(n, _check_finite(value, n, Method.PARTITION_SUM), Method.PARTITION_SUM)


# Interacting Fock space scalar product ⟨f^{⊗n}, g^{⊗n}⟩_n: same computation
ifs_inner = inner_n_partition


def inner_n_partition_printed(f: StepFunction, g: StepFunction, c: float, n: int) -> complex:
    """
    Partition sum with the printed coefficient

        (n!)² 2^{2n-1} c^{Σ i_k} / (i_1!…i_k! 2^{i_2}…k^{i_k}),

    kept only so the equivalence tests can show that it is rejected.
    """
    c = CouplingConstant(c)
    _check_dimension(f, g)
    moments = _moments(f, g, n)
    prefactor = float(math.factorial(n)) ** 2 * 2.0 ** (2 * n - 1)
    total = 0j
    for partition in enumerate_partitions(n):
        term = 1.0 + 0j
        for k, i in partition.items():
            term *= (c * moments[k] / k) ** i / math.factorial(i)
        total += term
    return prefactor * total


def _growth_factor(h: StepFunction, c: float, m: int) -> float:
    """4m(m-1)‖h‖∞² + 2cm‖h‖₂²"""
    return 4.0 * m * (m - 1) * norm_inf(h) ** 2 + 2.0 * c * m * norm_p(h, 2) ** 2


def _step_ratio_sup(h: StepFunction, c: float, n: int) -> float:
    """sup over m > n of 4‖h‖∞²(m-1)/m + 2c‖h‖₂²/m"""
    a = norm_inf(h) ** 2
    b = norm_p(h, 2) ** 2
    m = n + 1
    return max(4.0 * a * (m - 1) / m + 2.0 * c * b / m, 4.0 * a)


def tail_ratio(f: StepFunction, g: StepFunction, c: float, n: int) -> float:
    """
    Uniform bound for U_m / U_{m-1}, m > n, where
    U_m = ‖B⁺ᵐ_f Φ‖ ‖B⁺ᵐ_g Φ‖ / (m!)².

    No radius check: at ‖f‖∞ = ‖g‖∞ = 1/2 the ratio is >= 1.
    """
    c = CouplingConstant(c)
    return float(np.sqrt(_step_ratio_sup(f, c, n) * _step_ratio_sup(g, c, n)))


def series_kernel(f: StepFunction, g: StepFunction, c: float, n: int) -> Tuple[complex, TailBound]:
    """
    Partial sum Σ_{m<=n} I(m)/(m!)² of ⟨Ψ(f), Ψ(g)⟩ and a bound on the tail.

    The tail is at most U_n ρ/(1-ρ) with ρ = tail_ratio(f, g, c, n) and
    U_n = sqrt(I_ff(n) I_gg(n))/(n!)².

    Raises:
        DomainError: outside the existence radius
        TailNotContracting: if ρ >= 1 at the truncation order
    """
    c = CouplingConstant(c)
    _check_dimension(f, g)
    require_admissible(f, "f")
    require_admissible(g, "g")

    values = inner_n_sequence(f, g, c, n)
    partial = 0j
    factorial_sq = 1.0
    for m, value in enumerate(values):
        if m > 0:
            factorial_sq *= float(m) ** 2
        partial += value / factorial_sq

    rho = tail_ratio(f, g, c, n)
    if rho >= 1.0:
        raise TailNotContracting(
            "series majorant does not contract at this truncation",
            {"truncation": n, "ratio": rho},
        )
    if rho > SLOW_CONTRACTION_RATIO:
        logger.warning(f"Slow tail contraction: ratio {rho:.6f} at N={n}")

    norm_f = inner_n_sequence(f, f, c, n)[n].real
    norm_g = inner_n_sequence(g, g, c, n)[n].real
    u_n = np.sqrt(max(norm_f, 0.0) * max(norm_g, 0.0)) / factorial_sq
    bound = float(u_n * rho / (1.0 - rho))
    return complex(partial), TailBound(n, bound, rho)


def norm_growth_check(f: StepFunction, c: float, m_max: int, rtol: float = 1e-12) -> bool:
    """
    ‖B⁺ᵐ_f Φ‖² <= [4m(m-1)‖f‖∞² + 2cm‖f‖₂²] ‖B⁺⁽ᵐ⁻¹⁾_f Φ‖² for all m <= m_max.

    Constant functions attain equality, so the comparison carries a
    relative slack ``rtol``.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be at least 1, got {m_max}")
    c = CouplingConstant(c)
    norms = [v.real for v in inner_n_sequence(f, f, c, m_max)]
    for m in range(1, m_max + 1):
        rhs = _growth_factor(f, c, m) * norms[m - 1]
        if norms[m] > rhs * (1.0 + rtol) + 1e-300:
            logger.info(f"Norm growth bound fails at m={m}: {norms[m]:.6e} > {rhs:.6e}")
            return False
    return True
