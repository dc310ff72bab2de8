# core/runner.py
"""
Experiment dispatch behind the management commands. `run` returns the exit status
(0 iff every asserted invariant passed) and the files it wrote.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blaschke_opt import SearchBudget, family4_experiment
from .choi_family import WeightVector, build_matrix, canonicalize, is_normal
from .conformal import EllipseMap, gamma_profile, solve_map
from .crouzeix_report import (
    SCHEMA_VERSION, Tolerances, chain_check, map_controls, remark2_report, verify_choi,
    verify_two_by_two,
)
from .exceptions import CrouzeixError, ReportError
from .numrange import boundary, symmetry_report
from .serializers import csv_text, dumps, write_atomic

logger = logging.getLogger(__name__)

COMMANDS = ('psi', 'sweep', 'remark2', 'family4', 'boundary', 'map')
FORMATS = ('json', 'csv')
DEFAULT_A_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)

MODULUS_RANGE = (0.05, 1.5)
REMARK2_HAUSDORFF_TOL = 1e-7
REMARK2_PSI_TOL = 1e-8
FAMILY4_ROTATION_TOL = 1e-6
GAMMA_SLACK = 1e-9

SWEEP_COLUMNS = [
    'index', 'weights', 'rescaled', 'psi', 'k_star', 'c', 'h0_lambda1', 's0_norm',
    'bound_value', 'strict_margin', 'identity_residual', 'extremal_orthogonality',
    'flags', 'passed',
]
REMARK2_COLUMNS = ['phi', 'hausdorff', 'psi', 'closed_form', 'error', 'equality']
FAMILY4_COLUMNS = [
    'a', 'grid_size', 'c', 'rotation_defect', 'phi_identity_residual', 'max_power_k',
    'max_power_value', 'max_blaschke_value', 'gap', 'degree', 'zeros', 'exhausted', 'counterexample', 'error',
]
BOUNDARY_COLUMNS = ['theta', 'rho', 're', 'im']
MAP_COLUMNS = ['s', 't', 're', 'im']


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int
    seed: int
    tolerances: Tolerances
    output: Path
    format: str = 'json'
    weights: tuple = None
    matrix: tuple = None
    d: int = None
    count: int = None
    grid: int = 64
    a_grid: tuple = DEFAULT_A_GRID

    def __post_init__(self):
        object.__setattr__(self, 'output', Path(self.output))


@dataclass
class RunOutcome:
    status: int = 0
    files: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    summary: list = field(default_factory=list)


def _write(outcome, path, text):
    outcome.files.append(write_atomic(path, text))


def _failures_dir(output):
    return output.with_name(f'{output.stem}_failures')


def _report_payload(report, ledger):
    return {'schema_version': SCHEMA_VERSION, 'report': report.as_dict(), 'chain': ledger.as_list(),
            'passed': ledger.passed}


def _run_psi(config, outcome):
    try:
        if config.matrix is not None:
            A = np.array(config.matrix, dtype=complex).reshape(2, 2)
            report = verify_two_by_two(A, n=config.n, tolerances=config.tolerances)
        else:
            report = verify_choi(WeightVector(config.weights), n=config.n, tolerances=config.tolerances)
    except ReportError as exc:
        payload = {'schema_version': SCHEMA_VERSION, 'error': str(exc), 'report': exc.report}
        _write(outcome, config.output, dumps(payload))
        outcome.status = 1
        outcome.failures.append(str(config.output))
        return
    ledger = chain_check(report)
    if config.format == 'csv':
        scalars = {k: v for k, v in report.as_dict().items() if k not in ('tolerances',)}
        text = csv_text(list(scalars), [list(scalars.values())])
    else:
        text = dumps(_report_payload(report, ledger))
    _write(outcome, config.output, text)
    outcome.summary.append(f'psi = {report.psi:.12g} (k* = {report.k_star}, flags: {", ".join(report.flags) or "none"})')
    if not ledger.passed:
        outcome.status = 1
        outcome.failures.append(str(config.output))
        for entry in ledger.failures():
            logger.error('psi(%s): %s failed (value %.6g, bound %.6g, tolerance %.1e)',
                         report.weights, entry.name, entry.value, entry.bound, entry.tolerance)


def draw_weights(rng, d):
    """|alpha_j| uniform in [0.05, 1.5], phases uniform; rescaled to unit product when larger."""
    moduli = rng.uniform(*MODULUS_RANGE, size=d)
    phases = rng.uniform(0.0, 2 * np.pi, size=d)
    product = float(np.prod(moduli))
    rescaled = product > 1.0
    if rescaled:
        moduli = moduli / product ** (1.0 / d)
    return WeightVector(tuple(moduli * np.exp(1j * phases))), rescaled


def _run_sweep(config, outcome):
    rng = np.random.default_rng(config.seed)
    rows = []
    failures_dir = _failures_dir(config.output)
    for index in range(config.count):
        wv, rescaled = draw_weights(rng, config.d)
        try:
            report = verify_choi(wv, n=config.n, tolerances=config.tolerances)
        except ReportError as exc:
            path = failures_dir / f'{index}.json'
            _write(outcome, path, dumps({'schema_version': SCHEMA_VERSION, 'index': index,
                                         'error': str(exc), 'report': exc.report}))
            outcome.failures.append(str(path))
            rows.append([index, list(wv.alpha), rescaled] + [None] * 10 + [False])
            continue
        ledger = chain_check(report)
        if not ledger.passed:
            path = failures_dir / f'{index}.json'
            _write(outcome, path, dumps(_report_payload(report, ledger)))
            outcome.failures.append(str(path))
        rows.append([
            index, list(wv.alpha), rescaled, report.psi, report.k_star, report.c, report.h0_lambda1,
            report.s0_norm, report.bound_value, report.strict_margin, report.identity_residual,
            report.extremal_orthogonality, '|'.join(report.flags), ledger.passed,
        ])
    if config.format == 'json':
        text = dumps({'schema_version': SCHEMA_VERSION, 'seed': config.seed, 'd': config.d,
                      'rows': [dict(zip(SWEEP_COLUMNS, row)) for row in rows]})
    else:
        text = csv_text(SWEEP_COLUMNS, rows)
    _write(outcome, config.output, text)
    outcome.summary.append(f'{config.count} instances, {len(outcome.failures)} failing')
    if outcome.failures:
        outcome.status = 1


def _run_remark2(config, outcome):
    records = [remark2_report(phi, n=config.n) for phi in np.linspace(0.0, np.pi / 2, config.grid)]
    rows = [[r.phi, r.hausdorff, r.psi, r.closed_form, r.error, r.equality] for r in records]
    if config.format == 'json':
        text = dumps({'schema_version': SCHEMA_VERSION, 'rows': [dict(zip(REMARK2_COLUMNS, row)) for row in rows]})
    else:
        text = csv_text(REMARK2_COLUMNS, rows)
    _write(outcome, config.output, text)
    bad = [r for r in records if r.hausdorff > REMARK2_HAUSDORFF_TOL or r.error > REMARK2_PSI_TOL]
    outcome.summary.append(f'{len(records)} angles, max psi error {max(r.error for r in records):.3e}')
    if bad:
        outcome.status = 1
        outcome.failures.append(str(config.output))
        logger.error('remark2: %d angles violate the disk / closed-form checks', len(bad))


def _run_family4(config, outcome):
    budget = SearchBudget.from_settings(seed=config.seed)
    records = family4_experiment(config.a_grid, n=config.n, budget=budget, gap_tol=config.tolerances.gap,
                                 quadrature_tol=config.tolerances.quadrature)
    for r in records:
        if r.error:
            continue
        if r.rotation_defect > FAMILY4_ROTATION_TOL:
            r.error = f'rotation defect {r.rotation_defect:.3e}'
        elif r.phi_identity_residual > config.tolerances.quadrature:
            r.error = f'phi(A) = cA residual {r.phi_identity_residual:.3e}'
    rows = [[getattr(r, column) for column in FAMILY4_COLUMNS] for r in records]
    if config.format == 'json':
        text = dumps({'schema_version': SCHEMA_VERSION, 'rows': [dict(zip(FAMILY4_COLUMNS, row)) for row in rows]})
    else:
        text = csv_text(FAMILY4_COLUMNS, rows)
    _write(outcome, config.output, text)
    bad = [r for r in records if not r.passed]
    outcome.summary.append(f'{len(records)} family members, max gap '
                           f'{max((r.gap for r in records if r.gap is not None), default=math.nan):.3e}')
    if bad:
        outcome.status = 1
        outcome.failures.append(str(config.output))


def _run_boundary(config, outcome):
    bc = boundary(build_matrix(WeightVector(config.weights)), config.n)
    if config.format == 'json':
        text = dumps({'schema_version': SCHEMA_VERSION, 'n': bc.n,
                      'rows': [dict(zip(BOUNDARY_COLUMNS, row)) for row in bc.rows()]})
    else:
        text = csv_text(BOUNDARY_COLUMNS, bc.rows())
    _write(outcome, config.output, text)
    outcome.summary.append(f'{bc.n} boundary samples, rho in [{bc.rho.min():.9g}, {bc.rho.max():.9g}]')


def _run_map(config, outcome):
    weights = canonicalize(WeightVector(config.weights)).weights
    d = weights.d
    bc = boundary(build_matrix(weights), config.n)
    symmetry = symmetry_report(bc, d)
    disk_map = solve_map(bc, d, **map_controls())
    ellipse_c1 = None
    if d == 2 and not symmetry.is_disk and not is_normal(weights):
        ellipse_c1 = EllipseMap.for_weights(weights).c1
    rising, falling = gamma_profile(disk_map, d, 256).monotonicity_defects()
    values = disk_map.boundary_values
    if config.format == 'csv':
        rows = [(float(s), float(t), float(v.real), float(v.imag))
                for s, t, v in zip(disk_map.s, disk_map.t_of_s, values)]
        text = csv_text(MAP_COLUMNS, rows)
    else:
        text = dumps({
            'schema_version': SCHEMA_VERSION,
            'weights': weights,
            'n': disk_map.n,
            'c1': disk_map.c1,
            'ellipse_c1': ellipse_c1,
            'iterations': disk_map.iterations,
            'residual': disk_map.residual,
            'analyticity_defect': disk_map.analyticity_defect,
            'symmetry_defect': disk_map.symmetry_defect,
            'rotation_defect': symmetry.rotation_defect,
            'reflection_defect': symmetry.reflection_defect,
            'boundary_modulus_rise': rising,
            'radial_ratio_fall': falling,
            'coeffs': disk_map.coeffs[:64],
        })
    _write(outcome, config.output, text)
    outcome.summary.append(f'sigma\'(0) = {disk_map.c1:.12g} after {disk_map.iterations} iterations')
    if rising > GAMMA_SLACK or falling > GAMMA_SLACK:
        outcome.status = 1
        outcome.failures.append(str(config.output))
        logger.error('map: monotonicity defects %.3e / %.3e exceed %.0e', rising, falling, GAMMA_SLACK)


_DISPATCH = {
    'psi': _run_psi,
    'sweep': _run_sweep,
    'remark2': _run_remark2,
    'family4': _run_family4,
    'boundary': _run_boundary,
    'map': _run_map,
}


def run(config):
    """Execute one experiment; library errors propagate as CrouzeixError."""
    outcome = RunOutcome()
    logger.info('%s: n=%d seed=%d output=%s', config.command, config.n, config.seed, config.output)
    try:
        _DISPATCH[config.command](config, outcome)
    except CrouzeixError:
        logger.exception('%s failed', config.command)
        raise
    return outcome
