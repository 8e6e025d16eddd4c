"""Dense symmetric-matrix primitives: eigendecomposition, principal square
root, and SPD repair by eigenvalue clipping.

All routines work on plain (d, d) float ndarrays. Square roots are computed
by eigendecomposition rather than an iterative scheme; at the dimensions
handled here (d <= 64 in practice) that is both exact enough and fast.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput, NotPositiveSemidefinite

# Eigenvalues above -PSD_TOL are treated as numerically nonnegative.
PSD_TOL = 1e-10

# Default eigenvalue floor when repairing estimated covariances.
REPAIR_FLOOR = 1e-6

SYMMETRY_ATOL = 1e-12


def check_symmetric(m: np.ndarray, atol: float = SYMMETRY_ATOL) -> np.ndarray:
    """Validate that ``m`` is a finite square symmetric matrix.

    Returns the input as a float ndarray. Raises InvalidInput otherwise.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix contains non-finite entries")
    if not np.allclose(m, m.T, rtol=0.0, atol=atol):
        raise InvalidInput(f"matrix is not symmetric within {atol}")
    return m


def sym_eigen(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues in ascending
    order and eigenvectors as orthonormal columns, so that
    ``m == V @ diag(w) @ V.T``.
    """
    m = check_symmetric(m)
    w, v = np.linalg.eigh(m)
    return w, v


def spd_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric positive semidefinite matrix.

    Eigenvalues within ``PSD_TOL`` of zero are clipped to zero before
    rooting; anything more negative raises NotPositiveSemidefinite.
    """
    w, v = sym_eigen(m)
    if w[0] < -PSD_TOL:
        raise NotPositiveSemidefinite(
            f"minimum eigenvalue {w[0]:.3e} is below -{PSD_TOL:.0e}"
        )
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return 0.5 * (root + root.T)


def make_spd(m: np.ndarray, floor: float = REPAIR_FLOOR) -> np.ndarray:
    """Clip eigenvalues of a symmetric matrix to at least ``floor``.

    Eigenvalue clipping gives the Frobenius-nearest matrix whose spectrum
    lies above the floor. Inputs that already satisfy the floor are
    returned unchanged.
    """
    if floor <= 0:
        raise InvalidInput(f"floor must be positive, got {floor}")
    m = check_symmetric(m)
    sym = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(sym)
    if w[0] >= floor:
        return sym
    repaired = (v * np.maximum(w, floor)) @ v.T
    return 0.5 * (repaired + repaired.T)
