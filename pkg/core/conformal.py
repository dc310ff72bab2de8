# core/conformal.py
"""
Riemann map between the interior of W(M) and the unit disk, normalised by
phi(0) = 0 and phi'(0) > 0.

The inverse map sigma is computed by Theodorsen's boundary-correspondence
iteration: with rho the polar radius of the boundary,

    sigma(e^{is}) = rho(t(s)) e^{i t(s)},   t(s) = s + K[log rho(t(s))],

K being the harmonic conjugation (K cos ks = sin ks) applied by FFT. The fixed
point is reached with damped updates; the Taylor coefficients of sigma are then
read off the FFT of the boundary samples.

For d = 2 the domain is an ellipse, whose map is written in closed form with
Jacobi's sn (EllipseMap); the iteration is not used there.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.polynomial import polyval
from scipy.special import ellipj

from .choi_family import eigenvalues, power_norms
from .exceptions import DomainError, GeometryError, InversionError, MapFailureError
from .numrange import angle_grid, trig_interpolate

logger = logging.getLogger(__name__)

DEFAULT_DAMPING = 0.5
DEFAULT_MAX_ITER = 2000
DEFAULT_TOL = 1e-12
ANALYTICITY_WARN = 1e-8
NEAR_NORMAL_RMARGIN = 1e-4
PHI_MARGIN = 1e-6

_NEWTON_STEPS = 60
_MIN_DAMPING = 1.0 / 64
_SUSTAINED_RISE = 3
_RECOVERY_STEPS = 20
_BOUNDARY_SNAP = 1e-14


@dataclass(frozen=True, eq=False)
class DiskMap:
    n: int
    s: np.ndarray
    t_of_s: np.ndarray
    coeffs: np.ndarray
    symmetry_order: int
    c1: float
    residual: float
    iterations: int
    analyticity_defect: float
    symmetry_defect: float
    log_rho_coeffs: np.ndarray

    @property
    def boundary_values(self):
        """sigma(e^{is}) on the uniform s-grid."""
        return self.rho(self.t_of_s) * np.exp(1j * self.t_of_s)

    def rho(self, t):
        return np.exp(trig_interpolate(self.log_rho_coeffs, t).real)

    def correspondence(self, s):
        """t(s) at arbitrary parameters s."""
        offsets = np.fft.fft(self.t_of_s - self.s) / self.n
        return np.asarray(s, dtype=float) + trig_interpolate(offsets, s).real


@dataclass(frozen=True)
class MapScalars:
    c: complex
    beta0: complex
    beta_at_lambda1: complex
    h0_at_lambda1: float
    k_star: int
    lambda1: complex
    near_normal: bool = False


@dataclass(frozen=True, eq=False)
class GammaProfile:
    t: np.ndarray
    boundary_modulus: np.ndarray
    x: np.ndarray
    ratio: np.ndarray

    def monotonicity_defects(self):
        """
        (largest increase of |sigma(e^{it})| on [0, pi/d], largest decrease of
        sigma(x)/x on (0, 1)); both are <= 0 for perfectly monotone samples.
        """
        rising = float(np.max(np.diff(self.boundary_modulus), initial=-np.inf))
        falling = float(np.max(-np.diff(self.ratio), initial=-np.inf))
        return rising, falling


def _conjugate(values):
    """Harmonic conjugate of a real periodic sample vector."""
    n = len(values)
    k = np.fft.fftfreq(n, d=1.0 / n)
    multiplier = -1j * np.sign(k)
    multiplier[n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(values) * multiplier).real


def solve_map(bc, d, damping=DEFAULT_DAMPING, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """Boundary correspondence and Taylor coefficients of sigma for the curve `bc`."""
    n = bc.n
    s = angle_grid(n)
    log_rho_coeffs = np.fft.fft(np.log(bc.rho)) / n

    t = s.copy()
    omega = damping
    defect = np.inf
    energy = np.inf
    rises = falls = 0
    for iteration in range(1, max_iter + 1):
        log_rho = trig_interpolate(log_rho_coeffs, t).real
        target = s + _conjugate(log_rho)
        update = target - t
        defect = float(np.max(np.abs(update)))
        if defect <= tol:
            t = target
            break
        # damping backs off only on a sustained rise of the mean-square update
        new_energy = float(np.sqrt(np.mean(update ** 2)))
        if new_energy > energy:
            rises, falls = rises + 1, 0
            if rises >= _SUSTAINED_RISE and omega > _MIN_DAMPING:
                omega = max(0.5 * omega, _MIN_DAMPING)
                rises = 0
                logger.debug('theodorsen: defect rising (%.3e), damping now %.4g', new_energy, omega)
        else:
            rises, falls = 0, falls + 1
            if falls >= _RECOVERY_STEPS and omega < damping:
                omega = min(1.25 * omega, damping)
                falls = 0
        energy = new_energy
        t = t + omega * update
    else:
        raise MapFailureError(
            f'boundary correspondence did not converge in {max_iter} iterations '
            f'(defect {defect:.3e})', defect=defect)

    spectrum = np.fft.fft(np.exp(trig_interpolate(log_rho_coeffs, t).real + 1j * t)) / n
    c1 = spectrum[1]
    # rotate the disk variable so that sigma'(0) > 0: sigma(w) -> sigma(w e^{-i gamma})
    gamma = float(np.angle(c1))
    coeffs = spectrum[:n // 2 + 1] * np.exp(-1j * gamma * np.arange(n // 2 + 1))
    if gamma:
        offsets = np.fft.fft(t - s) / n
        t = s - gamma + trig_interpolate(offsets, s - gamma).real

    scale = float(np.max(np.abs(coeffs)))
    analyticity_defect = float(np.linalg.norm(spectrum[n // 2 + 1:]) / abs(c1))
    off_pattern = np.arange(n // 2 + 1) % d != 1 % d
    symmetry_defect = float(np.max(np.abs(coeffs[off_pattern])) / scale)
    if analyticity_defect > ANALYTICITY_WARN:
        logger.warning('disk map: analyticity defect %.3e exceeds %.0e at n=%d (corners or under-resolved boundary)',
                       analyticity_defect, ANALYTICITY_WARN, n)
    logger.info('disk map: n=%d d=%d converged in %d iterations, c1=%.12g', n, d, iteration, abs(c1))
    return DiskMap(
        n=n, s=s, t_of_s=t, coeffs=coeffs, symmetry_order=d, c1=float(abs(c1)),
        residual=defect, iterations=iteration, analyticity_defect=analyticity_defect,
        symmetry_defect=symmetry_defect, log_rho_coeffs=log_rho_coeffs)


def _theta_constants(q):
    """(theta_2, theta_3, theta_4) at nome q, q <= e^{-pi}."""
    j = np.arange(1, 40)
    theta2 = 2.0 * q ** 0.25 * np.sum(q ** (j * (j - 1)))
    theta3 = 1.0 + 2.0 * np.sum(q ** (j * j))
    theta4 = 1.0 + 2.0 * np.sum((-1.0) ** j * q ** (j * j))
    return theta2, theta3, theta4


@dataclass(frozen=True)
class EllipseMap:
    """
    Exact disk map of the ellipse with semi-axes a > b on the real and imaginary
    axes and foci +-f, f = sqrt(a^2 - b^2):

        phi(z) = sqrt(k) sn((2K / pi) arcsin(z / f) | k^2),

    where K'/K = 4 eta / pi and tanh(eta) = b / a. The boundary is parameterised by
    tau(u) = f cos(u - i eta), on which phi(tau(u)) = sqrt(k) sn(K - 2Ku / pi + iK'/2).
    """
    semi_major: float
    semi_minor: float
    focus: float
    eta: float
    modulus: float
    comodulus: float
    quarter_period: float
    co_quarter_period: float

    @classmethod
    def from_axes(cls, semi_major, semi_minor):
        a, b = float(semi_major), float(semi_minor)
        if not a > b > 0.0:
            raise GeometryError(f'expected semi-axes a > b > 0, got {a:.6g}, {b:.6g}')
        eta = float(np.arctanh(b / a))
        # expand in whichever nome is small
        if eta >= np.pi / 4:
            theta2, theta3, theta4 = _theta_constants(np.exp(-4.0 * eta))
            k, kc = (theta2 / theta3) ** 2, (theta4 / theta3) ** 2
            K = 0.5 * np.pi * theta3 ** 2
            Kc = 4.0 * eta * K / np.pi
        else:
            theta2, theta3, theta4 = _theta_constants(np.exp(-np.pi ** 2 / (4.0 * eta)))
            kc, k = (theta2 / theta3) ** 2, (theta4 / theta3) ** 2
            Kc = 0.5 * np.pi * theta3 ** 2
            K = np.pi * Kc / (4.0 * eta)
        return cls(semi_major=a, semi_minor=b, focus=float(np.sqrt((a - b) * (a + b))), eta=eta,
                   modulus=float(k), comodulus=float(kc), quarter_period=float(K),
                   co_quarter_period=float(Kc))

    @classmethod
    def for_weights(cls, wv):
        """W(M(a_1, a_2)) for nonnegative a_1 != a_2 with a_1 a_2 > 0."""
        if wv.d != 2:
            raise GeometryError(f'the numerical range is an ellipse for d = 2 only, got d = {wv.d}')
        a1, a2 = np.abs(wv.array)
        if a1 * a2 == 0.0:
            raise GeometryError('W is a disk when a weight vanishes')
        return cls.from_axes((a1 + a2) / 2, abs(a1 - a2) / 2)

    @property
    def c1(self):
        """sigma'(0) = 1 / phi'(0)."""
        return np.pi * self.focus / (2.0 * self.quarter_period * np.sqrt(self.modulus))

    def sn(self, x):
        """Jacobi sn(x | k^2) at complex x from real-argument values."""
        x = np.asarray(x, dtype=complex)
        s, c, d, _ = ellipj(x.real, self.modulus ** 2)
        s1, c1, d1, _ = ellipj(x.imag, self.comodulus ** 2)
        return (s * d1 + 1j * c * d * s1 * c1) / (c1 ** 2 + self.modulus ** 2 * s ** 2 * s1 ** 2)

    def phi(self, z):
        z = np.asarray(z, dtype=complex)
        argument = 2.0 * self.quarter_period / np.pi * np.arcsin(z / self.focus)
        return np.sqrt(self.modulus) * self.sn(argument)

    def rho(self, t):
        """Polar radius of the ellipse."""
        a, b = self.semi_major, self.semi_minor
        return a * b / np.hypot(b * np.cos(t), a * np.sin(t))

    def nodes(self, u):
        return self.focus * np.cos(u - 1j * self.eta)

    def dnodes(self, u):
        return -self.focus * np.sin(u - 1j * self.eta)

    def boundary_phi(self, u):
        """phi(tau(u)), unimodular."""
        K = self.quarter_period
        return np.sqrt(self.modulus) * self.sn(K - 2.0 * K * np.asarray(u) / np.pi + 0.5j * self.co_quarter_period)


def _as_points(w):
    w = np.asarray(w, dtype=complex)
    return w, w.ndim == 0


def eval_sigma(disk_map, w):
    w, scalar = _as_points(w)
    w = np.atleast_1d(w)
    radius = np.abs(w)
    if np.any(radius > 1.0 + _BOUNDARY_SNAP):
        raise DomainError(f'sigma is defined on the closed unit disk, got |w| = {radius.max():.6g}')
    out = polyval(w, disk_map.coeffs)
    on_circle = radius >= 1.0 - _BOUNDARY_SNAP
    if np.any(on_circle):
        t = disk_map.correspondence(np.angle(w[on_circle]))
        out[on_circle] = disk_map.rho(t) * np.exp(1j * t)
    return out[0] if scalar else out


def eval_sigma_prime(disk_map, w):
    w, scalar = _as_points(w)
    k = np.arange(1, len(disk_map.coeffs))
    out = polyval(np.atleast_1d(w), k * disk_map.coeffs[1:])
    return out[0] if scalar else out


def inverse_correspondence(disk_map, t):
    """s with t(s) = t, by linear interpolation of the sampled correspondence."""
    two_pi = 2 * np.pi
    grid_s = np.concatenate([disk_map.s - two_pi, disk_map.s, disk_map.s + two_pi])
    grid_t = np.concatenate([disk_map.t_of_s - two_pi, disk_map.t_of_s, disk_map.t_of_s + two_pi])
    return np.interp(np.mod(t, two_pi), grid_t, grid_s)


def eval_phi(disk_map, z):
    """Invert sigma by Newton's method from z / c1 (or from the boundary correspondence near the boundary)."""
    z, scalar = _as_points(z)
    z = np.atleast_1d(z)
    radius = np.abs(z)
    angle = np.angle(z)
    boundary_radius = disk_map.rho(angle)
    relative = radius / boundary_radius
    if np.any(relative > 1.0 - PHI_MARGIN):
        raise DomainError(
            f'phi needs strictly interior points, got relative radius {relative.max():.9g}')

    w = z / disk_map.c1
    near = relative > 0.9
    if np.any(near):
        w[near] = relative[near] * np.exp(1j * inverse_correspondence(disk_map, angle[near]))
    w = np.where(np.abs(w) >= 1.0, w / np.abs(w) * (1.0 - 1e-6), w)

    scale = np.maximum(1.0, radius)
    for _ in range(_NEWTON_STEPS):
        residual = eval_sigma(disk_map, w) - z
        if np.all(np.abs(residual) <= 1e-14 * scale):
            break
        step = residual / eval_sigma_prime(disk_map, w)
        trial = w - step
        # backtrack to stay inside the disk
        for _ in range(30):
            outside = np.abs(trial) >= 1.0
            if not np.any(outside):
                break
            step = np.where(outside, 0.5 * step, step)
            trial = w - step
        w = trial

    residual = np.abs(eval_sigma(disk_map, w) - z)
    if np.any(residual > 1e-9):
        worst = int(np.argmax(residual))
        raise InversionError(
            f'Newton inversion of sigma failed at z = {z[worst]:.6g}',
            diagnostics={'residual': float(residual[worst]), 'w': complex(w[worst])})
    return w[0] if scalar else w


def map_scalars(disk_map, wv, disk_radius=None):
    """
    The scalar c with phi(M) = cM, beta(0), beta(lambda_1), the extremal power
    k* and h0(lambda_1) = 1 - (beta(0) / beta(lambda_1))^{k*}. `wv` must be canonical
    (nonnegative weights).
    """
    lambda1 = complex(eigenvalues(wv)[0])
    near_normal = False

    if disk_radius is not None:
        c = 1.0 / disk_radius
        beta0 = beta_lambda1 = disk_radius
    else:
        beta0 = disk_map.c1
        if lambda1 == 0:
            c = 1.0 / disk_map.c1
        else:
            rho_lambda = float(disk_map.rho(np.angle(lambda1)))
            diameter = 2.0 * float(np.max(disk_map.rho(disk_map.s)))
            near_normal = rho_lambda - abs(lambda1) < NEAR_NORMAL_RMARGIN * diameter
            try:
                c = complex(eval_phi(disk_map, lambda1)) / lambda1
            except (DomainError, InversionError):
                if not near_normal:
                    raise
                # lambda_1 sits on the boundary to working accuracy: radial projection
                c = 1.0 / rho_lambda
                logger.warning('map scalars: lambda1 = %.12g is on the boundary, radial c used', abs(lambda1))
        beta_lambda1 = 1.0 / c
        if abs(c.imag) <= 1e-9 * abs(c):
            c = c.real

    k_star = _extremal_power(c, wv)
    h0 = 1.0 - (beta0 / beta_lambda1) ** k_star if disk_radius is None else 0.0
    return MapScalars(
        c=c, beta0=beta0, beta_at_lambda1=beta_lambda1, h0_at_lambda1=float(np.real(h0)),
        k_star=k_star, lambda1=lambda1, near_normal=bool(near_normal))


def _extremal_power(c, wv):
    """Smallest k in 1..d-1 maximising |c|^k ||M^k||."""
    values = np.abs(c) ** np.arange(1, wv.d) * power_norms(wv)
    return int(np.flatnonzero(values >= values.max() * (1.0 - 1e-12))[0]) + 1


def ellipse_scalars(ellipse, wv):
    """Closed-form scalars for d = 2: c = sqrt(k) / f and h0(lambda_1) = 1 - pi / (2K)."""
    lambda1 = complex(eigenvalues(wv)[0])
    c = float(np.sqrt(ellipse.modulus) / ellipse.focus)
    beta0 = float(ellipse.c1)
    k_star = _extremal_power(c, wv)
    margin = ellipse.semi_minor ** 2 / (ellipse.semi_major + ellipse.focus)
    return MapScalars(
        c=c, beta0=beta0, beta_at_lambda1=1.0 / c, h0_at_lambda1=float(1.0 - (beta0 * c) ** k_star),
        k_star=k_star, lambda1=lambda1,
        near_normal=bool(margin < NEAR_NORMAL_RMARGIN * 2.0 * ellipse.semi_major))


def gamma_profile(disk_map, d, m):
    """|sigma(e^{it})| on [0, pi/d] and sigma(x)/x on (0, 1), m samples each."""
    t = np.linspace(0.0, np.pi / d, m)
    boundary_modulus = np.abs(eval_sigma(disk_map, np.exp(1j * t)))
    x = np.arange(1, m + 1) / (m + 1)
    ratio = (eval_sigma(disk_map, x.astype(complex)) / x).real
    return GammaProfile(t=t, boundary_modulus=boundary_modulus, x=x, ratio=ratio)
