"""Symmetric-matrix kernels used everywhere else in the package.

All public operations accept plain ``numpy`` arrays, validate aggressively, and
work on the symmetrized part ``(S + S.T)/2`` of their inputs.  Spectral
quantities are computed through a single eigendecomposition routine so that
clamping and tolerance policies stay consistent across the package.

Tolerance policy
----------------
A matrix counts as PSD when its smallest eigenvalue is ``>= -psd_tol`` with
``psd_tol = 1e-9 * max(1, lambda_max)``; eigenvalues in ``[-psd_tol, 0)`` are
clamped to zero rather than rejected.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionMismatch, InvalidInput, NotPositiveDefinite, NotPsd

__all__ = [
    "as_symmetric",
    "as_psd",
    "sym_eig",
    "psd_sqrt",
    "trace_sqrt_product",
    "solve_spd",
    "psd_tolerance",
]


def psd_tolerance(eigenvalues: NDArray) -> float:
    """Absolute eigenvalue tolerance used by the PSD checks: ``1e-9 * max(1, lambda_max)``."""
    lam_max = float(eigenvalues[0]) if eigenvalues.size else 0.0
    return 1e-9 * max(1.0, lam_max)


def _check_square(S, name: str = "matrix") -> NDArray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidInput(f"{name} must be a square 2-D array, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return S


def as_symmetric(S, name: str = "matrix") -> NDArray:
    """Validate a square real matrix and return its symmetric part.

    Parameters
    ----------
    S : array_like
        Square matrix with finite entries.
    name : str
        Label used in error messages.

    Returns
    -------
    ndarray
        ``(S + S.T) / 2``.

    Raises
    ------
    InvalidInput
        If ``S`` is not square 2-D or has non-finite entries.
    """
    S = _check_square(S, name)
    return 0.5 * (S + S.T)


def sym_eig(S) -> tuple[NDArray, NDArray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.

    Parameters
    ----------
    S : array_like
        Square matrix; its symmetric part is decomposed.

    Returns
    -------
    (w, V) : tuple of ndarray
        ``w`` holds eigenvalues in descending order, ``V`` the matching
        orthonormal eigenvectors as columns, so ``V @ diag(w) @ V.T``
        reconstructs the symmetric part of ``S``.
    """
    S = as_symmetric(S)
    w, V = np.linalg.eigh(S)
    return w[::-1].copy(), V[:, ::-1].copy()


def as_psd(S, name: str = "matrix") -> NDArray:
    """Validate that a matrix is PSD up to tolerance and clamp tiny negative eigenvalues.

    Parameters
    ----------
    S : array_like
        Square matrix expected to be positive semidefinite.
    name : str
        Label used in error messages.

    Returns
    -------
    ndarray
        Symmetric PSD reconstruction of ``S`` with negative eigenvalues in
        ``[-psd_tol, 0)`` clamped to zero.

    Raises
    ------
    NotPsd
        If the smallest eigenvalue is below ``-psd_tol``.
    """
    w, V = sym_eig(as_symmetric(S, name))
    tol = psd_tolerance(w)
    if w.size and w[-1] < -tol:
        raise NotPsd(f"{name} has eigenvalue {w[-1]:.6e} below -{tol:.1e}")
    w = np.clip(w, 0.0, None)
    R = (V * w) @ V.T
    return 0.5 * (R + R.T)


def psd_sqrt(S) -> NDArray:
    """Symmetric PSD square root computed through the eigendecomposition.

    Parameters
    ----------
    S : array_like
        PSD matrix (validated with the package tolerance).

    Returns
    -------
    ndarray
        The unique PSD matrix ``R`` with ``R @ R = S`` (up to clamping).
    """
    w, V = sym_eig(S)
    tol = psd_tolerance(w)
    if w.size and w[-1] < -tol:
        raise NotPsd(f"matrix has eigenvalue {w[-1]:.6e} below -{tol:.1e}")
    r = np.sqrt(np.clip(w, 0.0, None))
    R = (V * r) @ V.T
    return 0.5 * (R + R.T)


def trace_sqrt_product(S1, S2) -> float:
    """Trace of the matrix geometric cross term, ``Tr[(S2^{1/2} S1 S2^{1/2})^{1/2}]``.

    The value is symmetric in its arguments even though the formula is not.

    Parameters
    ----------
    S1, S2 : array_like
        PSD matrices of equal dimension.

    Returns
    -------
    float
        Sum of the square roots of the (clamped) eigenvalues of
        ``S2^{1/2} S1 S2^{1/2}``.
    """
    S1 = as_psd(S1, "S1")
    S2 = as_psd(S2, "S2")
    if S1.shape != S2.shape:
        raise DimensionMismatch(f"S1 has shape {S1.shape}, S2 has shape {S2.shape}")
    R = psd_sqrt(S2)
    M = R @ S1 @ R
    w, _ = sym_eig(M)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def solve_spd(G, B) -> NDArray:
    """Solve ``G X = B`` for symmetric positive definite ``G`` via Cholesky.

    Parameters
    ----------
    G : array_like
        Symmetric positive definite matrix.
    B : array_like
        Right-hand side, a vector or a matrix with matching leading dimension.

    Returns
    -------
    ndarray
        ``G^{-1} B`` with the same trailing shape as ``B``.

    Raises
    ------
    NotPositiveDefinite
        If the Cholesky factorization fails (singular or indefinite ``G``).
    DimensionMismatch
        If the shapes of ``G`` and ``B`` are incompatible.
    """
    G = as_symmetric(G, "G")
    B = np.asarray(B, dtype=float)
    if not np.all(np.isfinite(B)):
        raise InvalidInput("B contains non-finite entries")
    if B.ndim not in (1, 2) or B.shape[0] != G.shape[0]:
        raise DimensionMismatch(f"G has shape {G.shape} but B has shape {B.shape}")
    try:
        c, low = cho_factor(G, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"G is not positive definite: {exc}") from exc
    return cho_solve((c, low), B, check_finite=False)
