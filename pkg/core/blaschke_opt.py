# core/blaschke_opt.py
"""
Blaschke products on matrices and a multistart search for max ||B(A)|| over
products of degree <= m, used to test whether the disk bound of phi(A) is
reached by a power z^k. Includes the four-by-four family with rotation
invariant numerical range.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .conformal import eval_phi, solve_map
from .crouzeix_report import map_controls
from .exceptions import CrouzeixError, InvalidInputError, SingularFactorError
from .funcalc import cauchy_apply, contour_from_map
from .linalg_core import as_cmatrix, matrix_power, operator_norm
from .numrange import boundary, refinement_grids, symmetry_report

logger = logging.getLogger(__name__)

ZERO_MARGIN = 1e-12
POWER_SLACK = 1e-9


@dataclass(frozen=True)
class BlaschkeProduct:
    zeros: tuple = ()
    rotation: complex = 1.0

    def __post_init__(self):
        zeros = tuple(complex(a) for a in self.zeros)
        if any(abs(a) >= 1.0 - ZERO_MARGIN for a in zeros):
            raise InvalidInputError('Blaschke zeros must lie in the open unit disk')
        rotation = complex(self.rotation)
        if abs(abs(rotation) - 1.0) > 1e-12:
            raise InvalidInputError(f'rotation must be unimodular, got |{rotation}|')
        object.__setattr__(self, 'zeros', zeros)
        object.__setattr__(self, 'rotation', rotation)

    @classmethod
    def power(cls, k):
        return cls(zeros=(0.0,) * k)

    @property
    def degree(self):
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.rotation, dtype=complex)
        for a in self.zeros:
            out = out * (z - a) / (1.0 - np.conj(a) * z)
        return out

    def boundary_defect(self, n=256):
        """max | |B(e^{is})| - 1 | on n boundary samples."""
        s = 2 * np.pi * np.arange(n) / n
        return float(np.max(np.abs(np.abs(self(np.exp(1j * s))) - 1.0)))


@dataclass(frozen=True)
class SearchBudget:
    starts: int = 32
    max_evaluations: int = 2000
    xatol: float = 1e-10
    seed: int = 7

    @classmethod
    def from_settings(cls, **overrides):
        from django.conf import settings
        values = {
            'starts': settings.CROUZEIX_BLASCHKE_STARTS,
            'max_evaluations': settings.CROUZEIX_BLASCHKE_MAXFEV,
            'seed': settings.CROUZEIX_SEED,
        }
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class SearchResult:
    product: BlaschkeProduct
    value: float
    power_k: int
    power_value: float
    exhausted: bool = False
    evaluations: int = 0

    @property
    def gap(self):
        return self.value - self.power_value


@dataclass(frozen=True)
class Family4Params:
    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0):
            raise InvalidInputError(f'family parameter a must be a finite value >= 0, got {self.a}')

    @property
    def c(self):
        return math.sqrt(2 * self.a ** 2 / (2 + self.a ** 2))


@dataclass
class Family4Record:
    a: float
    grid_size: int = None
    c: complex = None
    rotation_defect: float = None
    phi_identity_residual: float = None
    max_power_k: int = None
    max_power_value: float = None
    max_blaschke_value: float = None
    gap: float = None
    degree: int = None
    zeros: list = field(default_factory=list)
    exhausted: bool = False
    counterexample: bool = False
    error: str = ''

    @property
    def passed(self):
        return not self.error and not self.counterexample


def eval_on_matrix(bp, A):
    """rotation * prod_j (I - conj(a_j) A)^{-1} (A - a_j I); the factors commute."""
    A = as_cmatrix(A)
    identity = np.eye(A.shape[0], dtype=complex)

    def factor(a):
        try:
            value = scipy.linalg.solve(identity - np.conj(a) * A, A - a * identity)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SingularFactorError(f'I - conj({a:.6g}) A is singular') from exc
        if not np.all(np.isfinite(value)):
            raise SingularFactorError(f'I - conj({a:.6g}) A is singular')
        return value

    return bp.rotation * reduce(np.matmul, (factor(a) for a in bp.zeros), identity)


def _zeros_from(params):
    """Plane -> open disk, w -> w / (1 + |w|)."""
    w = params[0::2] + 1j * params[1::2]
    zeros = w / (1.0 + np.abs(w))
    radius = np.abs(zeros)
    limit = 1.0 - 2 * ZERO_MARGIN
    return np.where(radius > limit, zeros / np.maximum(radius, 1e-300) * limit, zeros)


def _objective(A):
    def negative_norm(params):
        try:
            return -operator_norm(eval_on_matrix(BlaschkeProduct(_zeros_from(params)), A))
        except CrouzeixError:
            return np.inf
    return negative_norm


def power_values(A, max_degree):
    """(k, ||A^k||) for k = 0..max_degree."""
    return [(k, operator_norm(matrix_power(A, k))) for k in range(max_degree + 1)]


def maximize(A, max_degree, budget=None):
    """
    Nelder-Mead multistart over zeros of each degree 1..max_degree, starting from z^m
    and from `budget.starts` seeded draws. The result is never below max_k ||A^k||.
    """
    A = as_cmatrix(A)
    if max_degree < 1 or max_degree > A.shape[0] - 1:
        raise InvalidInputError(f'max_degree must be in [1, {A.shape[0] - 1}], got {max_degree}')
    budget = budget or SearchBudget.from_settings()
    powers = power_values(A, max_degree)
    power_k, power_value = max(powers, key=lambda item: item[1])

    best = BlaschkeProduct.power(power_k)
    best_value = power_value
    exhausted = False
    evaluations = 0
    objective = _objective(A)
    for m in range(1, max_degree + 1):
        rng = np.random.default_rng([budget.seed, m])
        starts = np.vstack([np.zeros((1, 2 * m)), rng.standard_normal((budget.starts, 2 * m))])
        for x0 in starts:
            result = minimize(objective, x0, method='Nelder-Mead',
                              options={'xatol': budget.xatol, 'fatol': 1e-12,
                                       'maxfev': budget.max_evaluations})
            evaluations += result.nfev
            if not result.success and result.nfev >= budget.max_evaluations:
                exhausted = True
            if np.isfinite(result.fun) and -result.fun > best_value:
                best_value = float(-result.fun)
                best = BlaschkeProduct(_zeros_from(result.x))
        logger.debug('blaschke search: degree %d done, best %.12g', m, best_value)

    if exhausted:
        logger.warning('blaschke search: evaluation budget exhausted on some starts (best %.12g)', best_value)
    if best_value > 2.0:
        logger.error('blaschke search: ||B(A)|| = %.12g exceeds 2', best_value)
    return SearchResult(product=best, value=best_value, power_k=power_k, power_value=power_value,
                        exhausted=exhausted, evaluations=evaluations)


def build_family4(p):
    a, c = p.a, p.c
    return np.array([
        [1, a, 0, c],
        [0, 1j, 1j * c, 0],
        [0, 0, -1, -a],
        [0, 0, 0, -1j],
    ], dtype=complex)


def _family4_map(A, n, max_n, quadrature_tol):
    """c = phi(1) and the phi(A) = cA residual, doubling the grid until the residual is within tolerance."""
    for grid in refinement_grids(n, max_n):
        disk_map = solve_map(boundary(A, grid), 4, **map_controls())
        c = complex(eval_phi(disk_map, 1.0))
        if abs(c.imag) <= 1e-9 * abs(c):
            c = c.real
        residual = operator_norm(cauchy_apply(contour_from_map(disk_map, 1), A) - c * A)
        if residual <= quadrature_tol:
            break
        logger.info('family4: phi(A) = cA residual %.3e at n=%d', residual, grid)
    return c, residual, grid


def _family4_record(a, n, max_n, budget, gap_tol, quadrature_tol):
    params = Family4Params(a)
    A = build_family4(params)
    record = Family4Record(a=a, grid_size=n)
    record.rotation_defect = symmetry_report(boundary(A, n), 4).rotation_defect
    if a == 0:
        # normal: W is the square with the eigenvalues as vertices
        c = 1.0
        record.phi_identity_residual = 0.0
    else:
        c, record.phi_identity_residual, record.grid_size = _family4_map(A, n, max_n, quadrature_tol)
    record.c = c
    search = maximize(c * A, 3, budget)
    record.max_power_k = search.power_k
    record.max_power_value = search.power_value
    record.max_blaschke_value = search.value
    record.gap = search.gap
    record.degree = search.product.degree
    record.zeros = list(search.product.zeros)
    record.exhausted = search.exhausted
    if search.gap > gap_tol:
        record.counterexample = True
        logger.error('family4 a=%g: Blaschke product beats every power by %.3e (zeros %s)',
                     a, search.gap, record.zeros)
    return record


def family4_experiment(a_grid, n=None, budget=None, gap_tol=None, quadrature_tol=None, max_n=None):
    """One Family4Record per a; instance failures are recorded and the run continues."""
    from django.conf import settings
    n = n or settings.CROUZEIX_GRID_SIZE
    max_n = max(n, max_n or settings.CROUZEIX_MAX_GRID_SIZE)
    budget = budget or SearchBudget.from_settings()
    if gap_tol is None:
        gap_tol = settings.CROUZEIX_TOLERANCES['gap']
    if quadrature_tol is None:
        quadrature_tol = settings.CROUZEIX_TOLERANCES['quadrature']
    records = []
    for a in a_grid:
        try:
            record = _family4_record(float(a), n, max_n, budget, gap_tol, quadrature_tol)
        except CrouzeixError as exc:
            logger.warning('family4 a=%g failed: %s', a, exc)
            record = Family4Record(a=float(a), error=f'{type(exc).__name__}: {exc}')
        records.append(record)
    return records
