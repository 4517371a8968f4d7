"""
Small complex Hermitian linear algebra.

Eigendecomposition by cyclic complex Jacobi rotations, PSD tests with a
witness vector, Hadamard products and determinants. Matrices are tiny
(order up to a few dozen), so every rotation is applied with dense numpy
row/column updates.
"""

from typing import NamedTuple, Optional, Tuple

import numpy as np

from src.utils.errors import ConvergenceFailure, DimensionMismatch, NotHermitian
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

HERMITIAN_RTOL = 1e-12
DEFAULT_MAX_SWEEPS = 100
# Off-diagonal mass (relative to ‖M‖_F) at which a sweep loop stops
OFF_DIAGONAL_RTOL = 1e-14


class HermitianMatrix:
    """
    Complex Hermitian matrix.

    The input is symmetrized as (M + M†)/2 after checking that the
    anti-Hermitian residual is at most 1e-12·‖M‖_F.
    """

    def __init__(self, entries, rtol: float = HERMITIAN_RTOL):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("Hermitian matrix must be square", {"shape": list(m.shape)})
        scale = np.linalg.norm(m)
        residual = np.linalg.norm(m - m.conj().T)
        if residual > rtol * max(scale, np.finfo(float).tiny):
            raise NotHermitian(
                "matrix is not Hermitian", {"residual": float(residual), "norm": float(scale)}
            )
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self._entries = m

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def order(self) -> int:
        return self._entries.shape[0]

    def frobenius(self) -> float:
        return float(np.linalg.norm(self._entries))

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _check_order(self, other)
        return HermitianMatrix(self._entries - other._entries)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _check_order(self, other)
        return HermitianMatrix(self._entries + other._entries)

    def quadratic_form(self, v) -> float:
        """v† M v (real for Hermitian M)"""
        v = np.asarray(v, dtype=complex)
        return float(np.real(np.vdot(v, self._entries @ v)))

    def tolist(self):
        return self._entries.tolist()

    def __repr__(self) -> str:
        return "HermitianMatrix(%r)" % (self._entries,)


class PsdResult(NamedTuple):
    is_psd: bool
    min_eig: float
    witness: Optional[np.ndarray]


def _check_order(a: HermitianMatrix, b: HermitianMatrix) -> None:
    if a.order != b.order:
        raise DimensionMismatch("matrix orders differ", {"left": a.order, "right": b.order})


def _as_hermitian(m) -> HermitianMatrix:
    return m if isinstance(m, HermitianMatrix) else HermitianMatrix(m)


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def eig_hermitian(m, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of a_pq with a diagonal unitary,
    then applies the real Jacobi rotation that annihilates the (now real)
    off-diagonal entry.

    Args:
        m: HermitianMatrix or array-like
        max_sweeps: cap on full cyclic sweeps

    Returns:
        (eigenvalues ascending, unitary matrix of eigenvectors as columns)

    Raises:
        ConvergenceFailure: if the sweep cap is reached
    """
    h = _as_hermitian(m)
    a = np.array(h.entries, dtype=complex)
    n = h.order
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 0 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v

    for sweep in range(max_sweeps):
        off = _off_diagonal_norm(a)
        if off <= OFF_DIAGONAL_RTOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= OFF_DIAGONAL_RTOL * scale * 1e-3:
                    continue
                phase = apq / mag
                diff = a[q, q].real - a[p, p].real
                zeta = diff / (2.0 * mag)
                t = 1.0 / (abs(zeta) + np.sqrt(zeta * zeta + 1.0))
                if zeta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # diag(1, conj(phase)) followed by the real rotation [[c, s], [-s, c]]
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
        logger.debug(f"Jacobi sweep {sweep + 1}: off-diagonal norm {off:.3e}")
    else:
        off = _off_diagonal_norm(a)
        if off > OFF_DIAGONAL_RTOL * scale * 10:
            raise ConvergenceFailure(
                "Jacobi iteration did not converge",
                {"sweeps": max_sweeps, "off_diagonal": float(off), "norm": float(scale)},
            )

    eigenvalues = np.real(np.diag(a))
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def is_psd(m, tol: float = 1e-10, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> PsdResult:
    """
    Positive semidefiniteness with threshold -tol·max(1, ‖M‖_F).

    When the minimal eigenvalue is negative, its normalized eigenvector is
    returned as ``witness`` (a direction with v† M v < 0).
    """
    h = _as_hermitian(m)
    if h.order == 0:
        return PsdResult(True, 0.0, None)
    eigenvalues, vectors = eig_hermitian(h, max_sweeps=max_sweeps)
    min_eig = float(eigenvalues[0])
    threshold = -tol * max(1.0, h.frobenius())
    witness = None
    if min_eig < 0.0:
        witness = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
    return PsdResult(min_eig >= threshold, min_eig, witness)


def hadamard(m, n) -> HermitianMatrix:
    """Entrywise (Schur) product"""
    a, b = _as_hermitian(m), _as_hermitian(n)
    _check_order(a, b)
    return HermitianMatrix(a.entries * b.entries)


def det(m) -> complex:
    """Determinant by LU factorization with partial pivoting"""
    entries = m.entries if isinstance(m, HermitianMatrix) else np.asarray(m, dtype=complex)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionMismatch("determinant needs a square matrix", {"shape": list(entries.shape)})
    return complex(np.linalg.det(entries))
