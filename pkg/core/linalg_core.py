# core/linalg_core.py
"""
Dense complex-matrix kernels: operator norms, singular pairs, Hermitian extremal
eigenpairs and shifted solves. Every other module goes through these helpers.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DegenerateInputError, InvalidInputError, SingularShiftError

# dim x dim complex array, finite entries
CMatrix = np.ndarray

# Relative size of the smallest singular value below which a shift is singular
SINGULAR_SHIFT_RTOL = 1e-13


def as_cmatrix(A):
    """Coerce to a square complex128 array and reject non-finite entries."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInputError(f'expected a square matrix, got shape {A.shape}')
    if not np.all(np.isfinite(A)):
        raise InvalidInputError('matrix has non-finite entries')
    return A


@dataclass(frozen=True, eq=False)
class SingularPair:
    value: float
    left: np.ndarray
    right: np.ndarray


def operator_norm(A):
    A = as_cmatrix(A)
    return float(scipy.linalg.svdvals(A)[0])


def top_singular_pair(A):
    """Largest singular value with unit vectors such that A @ right = value * left."""
    A = as_cmatrix(A)
    U, s, Vh = scipy.linalg.svd(A)
    if s[0] == 0.0:
        raise DegenerateInputError('top singular pair of the zero matrix is undefined')
    return SingularPair(value=float(s[0]), left=U[:, 0].copy(), right=Vh[0].conj())


def _check_hermitian(H):
    defect = np.linalg.norm(H - H.conj().T, 2) if H.size else 0.0
    scale = np.linalg.norm(H, 2) if H.size else 0.0
    if defect > 1e-12 * scale:
        raise InvalidInputError(f'matrix is not Hermitian (defect {defect:.3e})')


def hermitian_max_eigenpair(H):
    """Largest eigenvalue of a Hermitian matrix and a unit eigenvector."""
    H = as_cmatrix(H)
    _check_hermitian(H)
    w, V = scipy.linalg.eigh(H)
    return float(w[-1]), V[:, -1]


def hermitian_max_eigenpairs(stack):
    """
    Batched hermitian_max_eigenpair for an (n, d, d) stack. The stack is assumed
    Hermitian by construction (callers build it as (B + B*) / 2).
    """
    stack = np.asarray(stack, dtype=complex)
    w, V = np.linalg.eigh(stack)
    return w[:, -1], V[:, :, -1]


def matrix_power(A, k):
    if k < 0:
        raise InvalidInputError(f'negative power {k}')
    return np.linalg.matrix_power(as_cmatrix(A), k)


def is_normal_matrix(A, tol=1e-12):
    A = as_cmatrix(A)
    commutator = A @ A.conj().T - A.conj().T @ A
    return np.linalg.norm(commutator, 2) <= tol * max(1.0, operator_norm(A) ** 2)


def _nearest_eigenvalue_distance(A, taus):
    eigs = np.linalg.eigvals(A)
    return np.min(np.abs(np.asarray(taus)[:, None] - eigs[None, :]), axis=1)


def solve_shifted(A, tau, B):
    """Solve (tau I - A) X = B."""
    A = as_cmatrix(A)
    B = np.asarray(B, dtype=complex)
    shifted = tau * np.eye(A.shape[0]) - A
    s = scipy.linalg.svdvals(shifted)
    if s[-1] <= SINGULAR_SHIFT_RTOL * max(s[0], 1.0):
        distance = float(_nearest_eigenvalue_distance(A, [tau])[0])
        raise SingularShiftError(
            f'shift {tau} is numerically singular for the matrix', distance=distance)
    return scipy.linalg.solve(shifted, B)


def solve_shifted_stack(A, taus, B=None):
    """
    Solve (tau_j I - A) X_j = B for every shift in `taus` at once; B defaults to I.
    Returns an (n, d, m) stack.
    """
    A = as_cmatrix(A)
    taus = np.asarray(taus, dtype=complex)
    d = A.shape[0]
    if B is None:
        B = np.eye(d, dtype=complex)
    distances = _nearest_eigenvalue_distance(A, taus)
    scale = max(1.0, operator_norm(A))
    worst = int(np.argmin(distances))
    if distances[worst] <= 1e-12 * scale:
        raise SingularShiftError(
            f'shift {taus[worst]} hits the spectrum', distance=float(distances[worst]))
    shifted = taus[:, None, None] * np.eye(d) - A
    rhs = np.broadcast_to(np.asarray(B, dtype=complex), (len(taus),) + np.shape(B))
    try:
        return np.linalg.solve(shifted, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularShiftError(str(exc), distance=float(distances[worst])) from exc


def eigenvector_condition(A):
    """
    Condition number of the column-normalised eigenvector matrix, or None when A is
    numerically defective. psi(A) <= cond(V) for diagonalisable A.
    """
    A = as_cmatrix(A)
    _, V = scipy.linalg.eig(A)
    V = V / np.linalg.norm(V, axis=0)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > 1e12:
        return None
    return float(cond)
