# core/choi_family.py
"""
Weighted cyclic shifts M(alpha_1, ..., alpha_d) = P_d diag(alpha): construction,
canonical form, eigenvalues, power norms through cyclic partial products and the
diagonal scaling that realises the disk bound as a complete bound.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import InvalidInputError, UnboundedPsiError
from .linalg_core import as_cmatrix, operator_norm

logger = logging.getLogger(__name__)

# Explicit +infinity flag for the disk bound; never used in arithmetic
PSI_UNBOUNDED = 'unbounded'

NORMAL_TOL = 1e-12


@dataclass(frozen=True)
class WeightVector:
    alpha: tuple

    def __post_init__(self):
        alpha = tuple(complex(a) for a in self.alpha)
        if len(alpha) < 2:
            raise InvalidInputError(f'a weighted cyclic shift needs d >= 2 weights, got {len(alpha)}')
        if not all(np.isfinite(a) for a in alpha):
            raise InvalidInputError('weights must be finite')
        if not np.isfinite(np.prod(np.abs(alpha))):
            raise InvalidInputError('product of the weights overflows')
        object.__setattr__(self, 'alpha', alpha)

    @classmethod
    def of(cls, *alpha):
        return cls(tuple(alpha))

    @property
    def d(self):
        return len(self.alpha)

    @property
    def array(self):
        return np.array(self.alpha, dtype=complex)

    @property
    def product(self):
        return complex(np.prod(self.array))

    def moduli(self):
        return WeightVector(tuple(abs(a) for a in self.alpha))

    def scaled(self, c):
        return WeightVector(tuple(c * a for a in self.alpha))

    def __str__(self):
        return ','.join(_format_weight(a) for a in self.alpha)


def _format_weight(a):
    if a.imag == 0.0:
        return repr(a.real)
    return repr(a)


@dataclass(frozen=True, eq=False)
class ScalingWitness:
    y: np.ndarray
    cond: float
    scaled_norm: float


@dataclass(frozen=True, eq=False)
class Canonical:
    weights: WeightVector
    theta: float
    unitary: np.ndarray


@dataclass(frozen=True, eq=False)
class TwoByTwoReduction:
    weights: WeightVector
    shift: complex
    unitary: np.ndarray


def build_matrix(wv):
    """M[i][i+1] = alpha_{i+1}, M[d][1] = alpha_1 (1-based), zero elsewhere."""
    d = wv.d
    alpha = wv.array
    M = np.zeros((d, d), dtype=complex)
    M[np.arange(d - 1), np.arange(1, d)] = alpha[1:]
    M[d - 1, 0] = alpha[0]
    return M


def partial_product(wv, j, k):
    """varpi_k(alpha_j) = alpha_j ... alpha_{j+k-1}, 0-based cyclic j."""
    idx = (j + np.arange(k)) % wv.d
    return complex(np.prod(wv.array[idx]))


def partial_products(wv):
    """(d, d-1) table; column k-1 holds varpi_k(alpha_j) for every j."""
    d = wv.d
    alpha = wv.array
    table = np.empty((d, d - 1), dtype=complex)
    running = np.ones(d, dtype=complex)
    for k in range(1, d):
        running = running * np.roll(alpha, -(k - 1))
        table[:, k - 1] = running
    return table


def canonicalize(wv):
    """
    Diagonal unitary U and phase theta with U* M(alpha) U = e^{i theta} M(|alpha|).
    """
    d = wv.d
    alpha = wv.array
    phases = np.where(alpha != 0, np.angle(alpha), 0.0)
    product = wv.product
    theta = float(np.angle(product)) / d if product != 0 else 0.0

    # Chain the phase equations starting right after a vanishing weight (if any),
    # so that the only unused equation is the vacuous one.
    zeros = np.flatnonzero(alpha == 0)
    start = int(zeros[0]) if len(zeros) else 0
    eta = np.zeros(d)
    for step in range(1, d):
        j = (start + step) % d
        eta[j] = eta[(j - 1) % d] + theta - phases[j]
    U = np.diag(np.exp(1j * eta))
    return Canonical(weights=wv.moduli(), theta=theta, unitary=U)


def eigenvalues(wv):
    d = wv.d
    product = wv.product
    if product == 0:
        return np.zeros(d, dtype=complex)
    lambda1 = abs(product) ** (1.0 / d) * np.exp(1j * np.angle(product) / d)
    return lambda1 * np.exp(2j * np.pi * np.arange(d) / d)


def power_norms(wv):
    """||M^k|| for k = 1..d-1, read off the partial products."""
    return np.max(np.abs(partial_products(wv)), axis=0)


def is_normal(wv):
    moduli = np.abs(wv.array)
    return float(moduli.max() - moduli.min()) <= NORMAL_TOL


def scaling_witness(wv):
    """
    Diagonal Y with ||Y^{-1} M Y|| <= 1 built from x_j = max(1, varpi_1(alpha_j), ...,
    varpi_{d-1}(alpha_j)); positions y_i = x_{(i mod d)+1}.
    """
    alpha = wv.array
    if np.any(alpha.imag != 0) or np.any(alpha.real < 0):
        raise InvalidInputError('scaling_witness expects nonnegative weights (canonicalize first)')
    product = float(np.prod(alpha.real))
    if product > 1.0:
        raise UnboundedPsiError(f'product of the weights is {product:.6g} > 1: the disk bound is infinite')
    table = np.abs(partial_products(wv))
    x = np.maximum(1.0, table.max(axis=1))
    y = np.roll(x, -1)
    M = build_matrix(wv)
    scaled = (M / y[:, None]) * y[None, :]
    return ScalingWitness(y=y, cond=float(y.max() / y.min()), scaled_norm=operator_norm(scaled))


def psi_disk(wv):
    """max(1, max_k ||M^k||), or PSI_UNBOUNDED when |alpha_1...alpha_d| > 1."""
    if abs(wv.product) > 1.0:
        return PSI_UNBOUNDED
    return float(max(1.0, power_norms(wv).max()))


def reduce_two_by_two(A):
    """
    Write A - tr(A)/2 I = U* M(a_1, a_2) U for an arbitrary 2x2 matrix.

    In a Schur basis the traceless part is [[mu, t], [0, -mu]]; a unit vector
    x = (cos s, e^{i w} sin s) with x* T x = 0 completed by (-conj(x_2), conj(x_1))
    gives a basis where both diagonal entries vanish.
    """
    A = as_cmatrix(A)
    if A.shape != (2, 2):
        raise InvalidInputError(f'expected a 2x2 matrix, got {A.shape}')
    shift = complex(np.trace(A) / 2)
    B = A - shift * np.eye(2)
    T, Q = scipy.linalg.schur(B, output='complex')
    mu, t = T[0, 0], T[0, 1]
    s = 0.5 * np.arctan2(2 * abs(mu), abs(t))
    if mu != 0 and t != 0:
        rotation = -(mu / abs(mu)) * (abs(t) / t)
    else:
        rotation = 1.0
    x = np.array([np.cos(s), rotation * np.sin(s)], dtype=complex)
    y = np.array([-np.conj(x[1]), np.conj(x[0])])
    W = Q @ np.column_stack([x, y])
    C = W.conj().T @ B @ W
    # C = [[0, a_2], [a_1, 0]] = M(a_1, a_2)
    weights = WeightVector.of(C[1, 0], C[0, 1])
    return TwoByTwoReduction(weights=weights, shift=shift, unitary=W.conj().T)
