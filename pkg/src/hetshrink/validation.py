"""Array validation helpers shared across the package."""

import numpy as np

from .errors import (
    NonPositiveVarianceError,
    NotPositiveDefiniteError,
)

# Relative tolerance for symmetry / positive-definiteness checks.
SYM_TOL = 1e-10
# Relative tolerance for detecting equal eigenvalues.
EIG_TIE_TOL = 1e-8


def as_vector(x, name="x", p=None):
    """Coerce to a 1-D float64 array, optionally enforcing length p."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if p is not None and arr.shape[0] != p:
        raise ValueError(f"{name} must have length {p}, got {arr.shape[0]}")
    return arr


def as_matrix(m, name="m", p=None):
    """Coerce to a square 2-D float64 array, optionally enforcing size p."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {arr.shape}")
    if p is not None and arr.shape[0] != p:
        raise ValueError(f"{name} must be {p}x{p}, got {arr.shape[0]}x{arr.shape[1]}")
    return arr


def check_positive(v, name="d"):
    """Require every entry strictly positive."""
    v = as_vector(v, name)
    if v.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
        raise NonPositiveVarianceError(f"{name} must be strictly positive, got {v!r}")
    return v


def check_nonnegative(v, name="gamma"):
    """Require every entry finite and >= 0."""
    v = as_vector(v, name)
    if not np.all(np.isfinite(v)) or np.any(v < 0.0):
        raise NonPositiveVarianceError(f"{name} must be nonnegative, got {v!r}")
    return v


def is_symmetric(m, tol=SYM_TOL):
    m = np.asarray(m, dtype=float)
    scale = max(1.0, float(np.linalg.norm(m)))
    return float(np.linalg.norm(m - m.T)) <= tol * scale


def check_spd(m, name="sigma", tol=SYM_TOL):
    """Require a symmetric positive definite matrix (relative tolerance)."""
    m = as_matrix(m, name)
    if not is_symmetric(m, tol):
        raise NotPositiveDefiniteError(f"{name} is not symmetric within tolerance")
    w = np.linalg.eigvalsh((m + m.T) / 2.0)
    if w[0] <= tol * max(1.0, w[-1]):
        raise NotPositiveDefiniteError(
            f"{name} is not positive definite: min eigenvalue {w[0]:.3e}"
        )
    return m


def readonly(arr):
    """Return a read-only float64 copy (defensive for frozen dataclasses)."""
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out
