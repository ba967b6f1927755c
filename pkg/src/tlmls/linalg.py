"""Indefinite Hermitian structure of C^3 with signature (2, 1).

Vectors are complex arrays of shape ``(..., 3)`` and matrices complex arrays of
shape ``(..., 3, 3)``; every function here broadcasts over leading axes.
"""
import numpy as np
from scipy.linalg import expm

#: The form matrix; <z, w> = z^T P conj(w).
P = np.array([[0, 1, 0], [1, 0, 0], [0, 0, -1]], dtype=complex)
P.setflags(write=False)

IDENTITY = np.eye(3, dtype=complex)
IDENTITY.setflags(write=False)

DEFAULT_TOL = 1e-9


class NotInGroupError(ValueError):
    """Raised when a matrix fails a U(2,1) membership precondition."""


def max_norm(A):
    """Max absolute entry, the norm used for every tolerance check."""
    return float(np.max(np.abs(A))) if np.size(A) else 0.0


def dagger(M):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(M, -1, -2))


def herm_form(z, w):
    """<z, w> = z1 conj(w2) + z2 conj(w1) - z3 conj(w3)."""
    z = np.asarray(z, dtype=complex)
    w = np.conj(np.asarray(w, dtype=complex))
    return z[..., 0] * w[..., 1] + z[..., 1] * w[..., 0] - z[..., 2] * w[..., 2]


def metric_g(z, w):
    return np.real(herm_form(z, w))


def symplectic_omega(z, w):
    return np.imag(herm_form(z, w))


def p_adjoint(M):
    """P conj(M)^T P, the inverse of M whenever M lies in U(2,1)."""
    return P @ dagger(M) @ P


def u21_defect(M):
    """Per-matrix ``max|P M^T P conj(M) - id|`` (zero exactly on U(2,1))."""
    M = np.asarray(M, dtype=complex)
    D = P @ np.swapaxes(M, -1, -2) @ P @ np.conj(M) - IDENTITY
    return np.max(np.abs(D), axis=(-2, -1))


def is_u21(M, tol=DEFAULT_TOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.all(u21_defect(M) <= tol))


def is_su21(M, tol=DEFAULT_TOL):
    if not is_u21(M, tol):
        return False
    return bool(np.all(np.abs(np.linalg.det(np.asarray(M, dtype=complex)) - 1) <= tol))


def mat_exp(X):
    """Matrix exponential (Pade scaling and squaring)."""
    X = np.asarray(X, dtype=complex)
    if not np.all(np.isfinite(X)):
        raise ValueError("mat_exp needs finite entries")
    return expm(X)


def u21_inverse(M, tol=DEFAULT_TOL):
    """Inverse of ``M`` in U(2,1) via ``P conj(M)^T P``.

    Raises :class:`NotInGroupError` if ``M`` is not in U(2,1) within ``tol``.
    """
    M = np.asarray(M, dtype=complex)
    defect = float(np.max(u21_defect(M)))
    if defect > tol:
        raise NotInGroupError(f"matrix is not in U(2,1): defect {defect:.3e} > tol {tol:.1e}")
    return p_adjoint(M)


def random_traceless(rng, size=None):
    """Entrywise uniform in [-1, 1]^2 (re, im), then projected to trace zero."""
    shape = (() if size is None else (size,)) + (3, 3)
    X = rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)
    tr = np.trace(X, axis1=-2, axis2=-1)[..., None, None]
    return X - tr / 3 * IDENTITY


def random_su21_algebra(rng, size=None):
    """Random element of su(2,1), the fixed points of X -> -P conj(X)^T P."""
    X = random_traceless(rng, size)
    return 0.5 * (X - p_adjoint(X))
