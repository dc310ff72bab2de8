# core/funcalc.py
"""
Matrix functional calculus by periodic trapezoidal quadrature of Cauchy integrals
on the boundary of W, parameterised conformally by s -> sigma(e^{is}) so that
f0(tau(s)) = e^{iks} holds exactly on the nodes.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from .linalg_core import as_cmatrix, solve_shifted_stack
from .numrange import angle_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ContourData:
    nodes: np.ndarray
    dnodes: np.ndarray
    f_values: np.ndarray

    @property
    def n(self):
        return len(self.nodes)

    @property
    def s(self):
        return 2 * np.pi * np.arange(self.n) / self.n

    def with_values(self, values):
        return replace(self, f_values=np.asarray(values, dtype=complex))

    def conjugated(self):
        """Same contour carrying conj(f): the data of g0."""
        return self.with_values(np.conj(self.f_values))

    @classmethod
    def from_samples(cls, nodes, f_values):
        """Contour from uniform-parameter samples; tau'(s) by spectral differentiation."""
        nodes = np.asarray(nodes, dtype=complex)
        return cls(nodes=nodes, dnodes=spectral_derivative(nodes),
                   f_values=np.asarray(f_values, dtype=complex))


def spectral_derivative(samples):
    n = len(samples)
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(samples))


def contour_from_map(disk_map, k):
    """Boundary nodes sigma(e^{is}) with f0 boundary values e^{iks}."""
    nodes = disk_map.boundary_values
    return ContourData.from_samples(nodes, np.exp(1j * k * disk_map.s))


def contour_from_ellipse(ellipse, n, k):
    """Ellipse nodes f cos(u - i eta) on a uniform u-grid with f0 = phi^k on them."""
    u = angle_grid(n)
    return ContourData(nodes=ellipse.nodes(u), dnodes=ellipse.dnodes(u),
                       f_values=ellipse.boundary_phi(u) ** k)


def _weighted_resolvent_sum(weights, taus, A):
    resolvents = solve_shifted_stack(A, taus)
    # fixed summation order over the nodes
    return np.einsum('n,nij->ij', weights, resolvents)


def cauchy_apply(cd, A):
    """(1/2 pi i) sum_j f(tau_j) (tau_j - A)^{-1} tau'(s_j) (2 pi / n)."""
    A = as_cmatrix(A)
    weights = cd.f_values * cd.dnodes / (1j * cd.n)
    return _weighted_resolvent_sum(weights, cd.nodes, A)


def g0_matrix(cd, A):
    """g0(A) from contour data whose values are conj(f0)."""
    return cauchy_apply(cd, A)


def s0_matrix(cd, A):
    """
    S0(A) = (1/2 pi i) int f0(tau) ((tau - A)^{-1} dtau - (conj(tau) - A*)^{-1} conj(dtau)).
    """
    A = as_cmatrix(A)
    direct = cauchy_apply(cd, A)
    weights = cd.f_values * np.conj(cd.dnodes) / (1j * cd.n)
    adjoint = _weighted_resolvent_sum(weights, np.conj(cd.nodes), A.conj().T)
    return direct - adjoint


def h0_matrix_value(f0M, g0M):
    """tr(f0(M) g0(M)) / d, the matrix side of h0(M) = h0(lambda_1) I."""
    product = np.asarray(f0M) @ np.asarray(g0M)
    return complex(np.trace(product) / product.shape[0])
