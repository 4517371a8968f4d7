"""
Complex Hermitian linear algebra for Gram matrices.
"""

from src.linalg.hermitian import HermitianMatrix, PsdResult, det, eig_hermitian, hadamard, is_psd

__all__ = ["HermitianMatrix", "PsdResult", "det", "eig_hermitian", "hadamard", "is_psd"]
