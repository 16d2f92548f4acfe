"""Dense real matrix kernel: SPD tests, eigenvalue extremes, Frobenius
inner products and half-vectorization.

All functions are pure and operate on 2-D float64 numpy arrays.  Symmetric
inputs are validated against a relative tolerance and returned in
symmetrized form, so downstream modules never see drift between the two
triangles.
"""
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError, NumericError


@lru_cache(maxsize=128)
def _triu_indices(dim):
    rows, cols = np.triu_indices(dim)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols

# Relative asymmetry above which an allegedly symmetric input is rejected
# instead of silently averaged.
SYMMETRY_RTOL = 1e-8

# Scaling factor of the Cholesky pivot threshold in is_spd.
PIVOT_RTOL = 1e-12


def as_matrix(a, name="matrix"):
    """Validate a 2-D finite real array and return it as float64."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return m


def check_symmetric(a, name="matrix", rtol=SYMMETRY_RTOL):
    """Validate symmetry and return the symmetrized average.

    Asymmetry beyond ``rtol`` relative to the largest magnitude entry is
    treated as a bug in the caller and rejected.
    """
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {m.shape}")
    scale = max(np.max(np.abs(m)), 1.0) if m.size else 1.0
    gap = np.max(np.abs(m - m.T)) if m.size else 0.0
    if gap > rtol * scale:
        raise InvalidInputError(
            f"{name} is not symmetric: max |a - a^t| = {gap:g} exceeds "
            f"{rtol:g} * {scale:g}"
        )
    return 0.5 * (m + m.T)


def is_spd(m):
    """Return True iff ``m`` is symmetric positive definite.

    The test attempts a Cholesky factorization and additionally requires
    every pivot to exceed ``PIVOT_RTOL * dim * max(diag)``, so nearly
    singular matrices are rejected deterministically.
    """
    a = check_symmetric(m, "is_spd input")
    d = a.shape[0]
    if d == 0:
        return True
    max_diag = np.max(np.diag(a))
    if max_diag <= 0.0:
        return False
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return False
    pivots = np.diag(chol) ** 2
    return bool(np.all(pivots > PIVOT_RTOL * d * max_diag))


def eig_extremes(m):
    """Smallest and largest eigenvalue of a symmetric matrix.

    Returns
    -------
    (lambda_min, lambda_max) : pair of floats
    """
    a = check_symmetric(m, "eig_extremes input")
    if a.size == 0:
        return 0.0, 0.0
    try:
        w = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"symmetric eigensolver failed: {exc}") from exc
    return float(w[0]), float(w[-1])


def spectral_norm(a):
    """Largest singular value, computed from the smaller Gram matrix."""
    m = as_matrix(a, "spectral_norm input")
    if m.size == 0:
        return 0.0
    gram = m @ m.T if m.shape[0] <= m.shape[1] else m.T @ m
    _, top = eig_extremes(0.5 * (gram + gram.T))
    return float(np.sqrt(max(top, 0.0)))


def frob_inner(a, b):
    """Frobenius inner product, the trace of ``a^t b``."""
    x = as_matrix(a, "frob_inner first argument")
    y = as_matrix(b, "frob_inner second argument")
    if x.shape != y.shape:
        raise InvalidInputError(
            f"frob_inner dimension mismatch: {x.shape} vs {y.shape}"
        )
    return float(np.sum(x * y))


def vech(m):
    """Half-vectorize a symmetric matrix.

    The order is fixed forever: lower triangle stacked column by column,
    so dimension 2 gives (m00, m10, m11).
    """
    a = check_symmetric(m, "vech input")
    d = a.shape[0]
    rows, cols = _triu_indices(d)
    # (r, c) runs over the upper triangle row by row; reading a[c, r]
    # yields the lower triangle column by column.
    return a[cols, rows].copy()


def unvech(v, dim):
    """Inverse of :func:`vech` for a given dimension."""
    vec = np.asarray(v, dtype=float).ravel()
    expected = dim * (dim + 1) // 2
    if vec.size != expected:
        raise InvalidInputError(
            f"unvech length mismatch: got {vec.size}, need {expected} for dim {dim}"
        )
    if not np.all(np.isfinite(vec)):
        raise InvalidInputError("unvech input contains non-finite entries")
    out = np.zeros((dim, dim))
    rows, cols = _triu_indices(dim)
    out[cols, rows] = vec
    out[rows, cols] = vec
    return out


def offdiag_abs_sum(m):
    """Elementwise L1 norm of a square matrix without its diagonal."""
    a = as_matrix(m, "offdiag_abs_sum input")
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError("offdiag_abs_sum needs a square matrix")
    return float(np.sum(np.abs(a)) - np.sum(np.abs(np.diag(a))))
