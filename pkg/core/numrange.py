# core/numrange.py
"""
Numerical range geometry.

The boundary of W(A) is sampled through its support function
h(theta) = lambda_max((e^{-i theta} A + e^{i theta} A*) / 2) and the polar radius
about 0 is the envelope rho(t) = min_theta h(theta) / cos(t - theta), first on the
grid and then refined by a golden-section search around the grid minimiser.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.polynomial import polyval
from scipy.spatial.distance import directed_hausdorff

from .exceptions import GeometryError, InvalidInputError
from .linalg_core import as_cmatrix, hermitian_max_eigenpairs

logger = logging.getLogger(__name__)

DEFAULT_GRID = 2048
MIN_GRID = 256
DISK_RTOL = 1e-9

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_REFINE_STEPS = 60
_ENVELOPE_CHUNK = 512


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    n: int
    theta: np.ndarray
    rho: np.ndarray
    support: np.ndarray
    points: np.ndarray
    support_points: np.ndarray

    def rows(self):
        """(theta, rho, re, im) rows for the CSV export."""
        return [
            (float(t), float(r), float(p.real), float(p.imag))
            for t, r, p in zip(self.theta, self.rho, self.points)
        ]

    def rho_at(self, t):
        """Trigonometric interpolation of rho at arbitrary angles."""
        return trig_interpolate(np.fft.fft(self.rho) / self.n, t).real


@dataclass(frozen=True)
class SymmetryReport:
    order: int
    rotation_defect: float
    reflection_defect: float
    is_disk: bool
    disk_radius: float = None


def _check_grid(n):
    if n < MIN_GRID or n & (n - 1):
        raise InvalidInputError(f'grid size must be a power of two >= {MIN_GRID}, got {n}')


def angle_grid(n):
    return 2 * np.pi * np.arange(n) / n


def refinement_grids(n, max_n):
    """n, 2n, 4n, ... while not above max(n, max_n)."""
    _check_grid(n)
    grid = n
    while True:
        yield grid
        if grid >= max_n:
            return
        grid *= 2


def trig_interpolate(coeffs, t):
    """
    Evaluate the trigonometric interpolant with FFT coefficients `coeffs` (already
    divided by n, n even) at arbitrary angles t. Nonnegative and negative frequencies
    are summed by Horner's rule in e^{it} and e^{-it}; the Nyquist mode is split evenly.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    half = len(coeffs) // 2
    t = np.asarray(t, dtype=float)
    e = np.exp(1j * t)
    positive = coeffs[:half]
    negative = np.concatenate([[0.0], coeffs[:half:-1]])
    return (polyval(e, positive) + polyval(e.conj(), negative)
            + coeffs[half] * np.cos(half * t))


def _rotated_hermitian_parts(A, angles):
    rot = np.exp(-1j * np.asarray(angles))[:, None, None] * A
    return 0.5 * (rot + rot.conj().transpose(0, 2, 1))


def support_function(A, angles):
    """h(theta) and the boundary points v* A v of the top eigenvectors."""
    values, vectors = hermitian_max_eigenpairs(_rotated_hermitian_parts(A, angles))
    points = np.einsum('ni,ij,nj->n', vectors.conj(), A, vectors)
    return values, points


def _grid_envelope(t, theta, support):
    """Index of the grid minimiser of h(theta) / cos(t - theta) for every t."""
    best = np.empty(len(t), dtype=int)
    for start in range(0, len(t), _ENVELOPE_CHUNK):
        block = t[start:start + _ENVELOPE_CHUNK]
        cosines = np.cos(block[:, None] - theta[None, :])
        facing = cosines > 1e-12
        ratios = np.full(cosines.shape, np.inf)
        np.divide(np.broadcast_to(support, cosines.shape), cosines, out=ratios, where=facing)
        best[start:start + _ENVELOPE_CHUNK] = np.argmin(ratios, axis=1)
    return best


def _refine_envelope(A, t, lo, hi):
    """Golden-section minimisation of h(theta) / cos(t - theta) on [lo, hi], vectorised over t."""

    def ratio(angles):
        values, _ = support_function(A, angles)
        return values / np.cos(t - angles)

    a, b = lo.copy(), hi.copy()
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = ratio(x1), ratio(x2)
    for _ in range(_REFINE_STEPS):
        left = f1 <= f2
        a, b = np.where(left, a, x1), np.where(left, x2, b)
        # the surviving interior point is reused, one new evaluation per step
        new_x1 = np.where(left, b - _GOLDEN * (b - a), x2)
        new_x2 = np.where(left, x1, a + _GOLDEN * (b - a))
        fp = ratio(np.where(left, new_x1, new_x2))
        f1, f2 = np.where(left, fp, f2), np.where(left, f1, fp)
        x1, x2 = new_x1, new_x2
    return np.minimum(f1, f2)


def boundary(A, n=DEFAULT_GRID):
    """Sample the boundary of W(A) on a uniform angular grid of n points."""
    A = as_cmatrix(A)
    _check_grid(n)
    theta = angle_grid(n)
    support, support_points = support_function(A, theta)
    scale = max(float(np.max(np.abs(support))), 1e-300)
    if support.min() <= 1e-10 * scale:
        raise GeometryError(
            f'0 is not an interior point of the numerical range (min support {support.min():.3e})')

    best = _grid_envelope(theta, theta, support)
    step = 2 * np.pi / n
    center = theta[best]
    coarse = support[best] / np.cos(theta - center)
    refined = _refine_envelope(A, theta, center - step, center + step)
    rho = np.minimum(coarse, refined)
    logger.debug('boundary: n=%d, rho in [%.6g, %.6g]', n, rho.min(), rho.max())
    return BoundaryCurve(
        n=n, theta=theta, rho=rho, support=support,
        points=rho * np.exp(1j * theta), support_points=support_points)


def circle_curve(radius, n=DEFAULT_GRID):
    _check_grid(n)
    theta = angle_grid(n)
    rho = np.full(n, float(radius))
    points = rho * np.exp(1j * theta)
    return BoundaryCurve(n=n, theta=theta, rho=rho, support=rho.copy(),
                         points=points, support_points=points.copy())


def _shifted(rho, shift):
    """rho(t - shift) by Fourier phase shift."""
    n = len(rho)
    k = np.fft.fftfreq(n, d=1.0 / n)
    spectrum = np.fft.fft(rho)
    coeffs = spectrum * np.exp(-1j * k * shift)
    # Nyquist mode of a real signal shifts as a cosine
    coeffs[n // 2] = spectrum[n // 2] * np.cos(n // 2 * shift)
    return np.fft.ifft(coeffs).real


def symmetry_report(bc, d):
    if d < 1:
        raise InvalidInputError(f'symmetry order must be positive, got {d}')
    rotation_defect = float(np.max(np.abs(bc.rho - _shifted(bc.rho, 2 * np.pi / d))))
    mirrored = bc.rho[(-np.arange(bc.n)) % bc.n]
    reflection_defect = float(np.max(np.abs(bc.rho - mirrored)))
    mean = float(bc.rho.mean())
    is_disk = (bc.rho.max() - bc.rho.min()) / mean <= DISK_RTOL
    return SymmetryReport(
        order=d, rotation_defect=rotation_defect, reflection_defect=reflection_defect,
        is_disk=bool(is_disk), disk_radius=mean if is_disk else None)


def hausdorff(bc1, bc2):
    """Symmetric Hausdorff distance between the sampled boundary points."""
    if bc1.n != bc2.n:
        raise InvalidInputError(f'grid mismatch: {bc1.n} vs {bc2.n}')
    p = np.column_stack([bc1.points.real, bc1.points.imag])
    q = np.column_stack([bc2.points.real, bc2.points.imag])
    return float(max(directed_hausdorff(p, q, seed=0)[0], directed_hausdorff(q, p, seed=0)[0]))
