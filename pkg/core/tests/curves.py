"""Boundary curves with a known disk map, for exercising the conformal and quadrature code."""

import math

import numpy as np
from numpy.polynomial.polynomial import polyval
from scipy.integrate import quad

from core.numrange import BoundaryCurve, angle_grid


def curve_from_series(coeffs, n):
    """
    Polar samples of the image of the unit circle under sigma(w) = sum coeffs[k] w^k,
    sigma star-shaped about 0; the parameter s with arg sigma(e^{is}) = theta is found by Newton.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    dcoeffs = np.arange(1, len(coeffs)) * coeffs[1:]
    theta = angle_grid(n)
    s = theta.copy()
    for _ in range(60):
        w = np.exp(1j * s)
        sigma = polyval(w, coeffs)
        rate = (w * polyval(w, dcoeffs) / sigma).real
        step = np.angle(sigma * np.exp(-1j * theta)) / rate
        s = s - np.clip(step, -0.5, 0.5)
    rho = np.abs(polyval(np.exp(1j * s), coeffs))
    points = rho * np.exp(1j * theta)
    return BoundaryCurve(n=n, theta=theta, rho=rho, support=rho.copy(), points=points,
                         support_points=points.copy())


def rounded_square_series(r=0.9, terms=120):
    """
    Schwarz-Christoffel type map C * int_0^w (1 - r^4 z^4)^{-1/2} dz with sigma(1) = 1,
    expanded as a power series; returns (coeffs, C) with C = sigma'(0) from quadrature.
    """
    integral, _ = quad(lambda t: 1.0 / math.sqrt(1.0 - (r * t) ** 4), 0.0, 1.0, epsabs=1e-15, epsrel=1e-15)
    scale = 1.0 / integral
    coeffs = np.zeros(4 * terms + 2)
    binomial = 1.0
    for j in range(terms):
        coeffs[4 * j + 1] = scale * binomial * r ** (4 * j) / (4 * j + 1)
        binomial *= (2 * j + 1) / (2 * j + 2)
    return coeffs, scale

