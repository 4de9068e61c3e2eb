"""Complex dense-matrix kernel shared by every other module.

Matrices are plain 2-D ``numpy.ndarray`` of complex128 (row-major); vectors
are 1-D float/complex arrays.  All functions are pure, never mutate their
inputs, and return finite values for finite inputs.
"""

import numpy as np

from . import _kernels

__all__ = [
    "DEFAULT_PINV_RTOL_SCALE",
    "as_cmatrix",
    "pinv",
    "row_norms_sq",
    "col_norms_sq",
    "abs2_hadamard",
]

#: default relative singular-value cutoff is max(rows, cols) times this
DEFAULT_PINV_RTOL_SCALE = 1e-12


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a non-empty 2-D complex128 array, validating shape."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError(f"matrix has a zero dimension: shape={m.shape}")
    return m


def pinv(a, rel_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via SVD with a relative rank cutoff.

    Singular values below ``rel_tol * sigma_max`` are treated as zero.  When
    ``rel_tol`` is None it defaults to ``max(rows, cols) * 1e-12``, which is
    loose enough to absorb rounding in double precision while still zeroing
    deliberately rank-deficient inputs.

    Parameters
    ----------
    a : array_like
        Non-empty matrix.
    rel_tol : float, optional
        Relative cutoff in [0, 1).

    Returns
    -------
    np.ndarray
        The pseudo-inverse, shape (cols, rows).
    """
    m = as_cmatrix(a)
    if rel_tol is None:
        rel_tol = max(m.shape) * DEFAULT_PINV_RTOL_SCALE
    elif not 0.0 <= rel_tol < 1.0:
        raise ValueError(f"rel_tol must be in [0, 1), got {rel_tol}")
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"SVD did not converge for {m.shape[0]}x{m.shape[1]} matrix"
        ) from exc
    cutoff = rel_tol * s[0]
    keep = s > cutoff
    if not np.any(keep):
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    return (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T


def row_norms_sq(a) -> np.ndarray:
    """Per-row squared l2 norms: out[k] = sum_j |a[k, j]|^2."""
    return _kernels.row_norms_sq(as_cmatrix(a))


def col_norms_sq(a) -> np.ndarray:
    """Per-column squared l2 norms: out[k] = sum_i |a[i, k]|^2."""
    return _kernels.col_norms_sq(as_cmatrix(a))


def abs2_hadamard(a) -> np.ndarray:
    """Element-wise squared magnitude |a[i, j]|^2 as a real matrix."""
    return _kernels.abs2(as_cmatrix(a))
