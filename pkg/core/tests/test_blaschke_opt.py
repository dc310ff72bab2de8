import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from core.blaschke_opt import (
    BlaschkeProduct, Family4Params, SearchBudget, build_family4, eval_on_matrix,
    family4_experiment, maximize, power_values,
)
from core.choi_family import WeightVector, build_matrix, psi_disk
from core.conformal import map_scalars, solve_map
from core.exceptions import InvalidInputError, SingularFactorError
from core.linalg_core import matrix_power, operator_norm
from core.numrange import boundary

SMALL = SearchBudget(starts=2, max_evaluations=400, seed=7)


class BlaschkeProductTests(SimpleTestCase):

    def test_scalar_values(self):
        bp = BlaschkeProduct(zeros=(0.5,), rotation=1j)
        self.assertAlmostEqual(complex(bp(0.5)), 0.0)
        self.assertAlmostEqual(complex(bp(0.0)), -0.5j)
        self.assertLessEqual(bp.boundary_defect(), 1e-14)

    def test_random_zeros_are_inner(self):
        rng = np.random.default_rng(41)
        zeros = 0.9 * rng.uniform(0, 1, 3) * np.exp(2j * np.pi * rng.uniform(0, 1, 3))
        self.assertLessEqual(BlaschkeProduct(zeros=tuple(zeros)).boundary_defect(512), 1e-13)

    def test_power(self):
        bp = BlaschkeProduct.power(3)
        self.assertEqual(bp.degree, 3)
        self.assertAlmostEqual(complex(bp(0.5j)), (0.5j) ** 3)

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            BlaschkeProduct(zeros=(1.0,))
        with self.assertRaises(InvalidInputError):
            BlaschkeProduct(zeros=(0.2,), rotation=2.0)


class EvalOnMatrixTests(SimpleTestCase):

    def test_constant(self):
        assert_allclose(eval_on_matrix(BlaschkeProduct(rotation=-1.0), np.eye(3)), -np.eye(3))

    def test_power_matches_matrix_power(self):
        M = build_matrix(WeightVector.of(1.2, 0.9, 0.8))
        assert_allclose(eval_on_matrix(BlaschkeProduct.power(2), M), matrix_power(M, 2), atol=1e-14)

    def test_diagonal(self):
        bp = BlaschkeProduct(zeros=(0.3 + 0.1j, -0.4))
        D = np.diag([0.5, -0.2j])
        assert_allclose(eval_on_matrix(bp, D), np.diag(bp(np.array([0.5, -0.2j]))), atol=1e-14)

    def test_contraction_stays_contractive(self):
        A = build_matrix(WeightVector.of(0.9, 0.5, 0.7))
        bp = BlaschkeProduct(zeros=(0.6, -0.3j, 0.2 + 0.5j))
        self.assertLessEqual(operator_norm(eval_on_matrix(bp, A)), 1.0 + 1e-12)

    def test_singular_factor(self):
        with self.assertRaises(SingularFactorError):
            eval_on_matrix(BlaschkeProduct(zeros=(0.5,)), np.diag([2.0, 0.0]))


class MaximizeTests(SimpleTestCase):

    def test_choi_maximum_is_a_power(self):
        wv = WeightVector.of(1.2, 0.9, 0.8)
        M = build_matrix(wv)
        cM = map_scalars(solve_map(boundary(M, 2048), 3), wv).c * M
        result = maximize(cM, 2, SMALL)
        self.assertGreaterEqual(result.value, result.power_value)
        self.assertLessEqual(result.gap, 1e-6)
        self.assertAlmostEqual(result.power_value, max(value for _, value in power_values(cM, 2)))
        self.assertGreater(result.evaluations, 0)

    def test_nilpotent_chain(self):
        cM = math.sqrt(2) * build_matrix(WeightVector.of(1, 1, 0))
        result = maximize(cM, 2, SMALL)
        self.assertEqual(result.power_k, 2)
        self.assertAlmostEqual(result.power_value, psi_disk(WeightVector.of(math.sqrt(2), math.sqrt(2), 0)))
        self.assertLessEqual(result.value, 2.0 + 1e-9)

    def test_more_starts_never_lower(self):
        rng = np.random.default_rng(42)
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        A = 0.8 * A / operator_norm(A)
        fewer = maximize(A, 2, SearchBudget(starts=2, max_evaluations=300))
        more = maximize(A, 2, SearchBudget(starts=4, max_evaluations=300))
        self.assertGreaterEqual(more.value, fewer.value)

    def test_two_by_two_grid_scan(self):
        A = np.array([[0.3, 0.9], [0.0, -0.2]])
        result = maximize(A, 1, SearchBudget(starts=8, max_evaluations=600))
        radius, angle = np.meshgrid(np.linspace(0, 0.95, 40), np.linspace(0, 2 * np.pi, 80, endpoint=False))
        scan = max(
            operator_norm(eval_on_matrix(BlaschkeProduct(zeros=(a,)), A))
            for a in (radius * np.exp(1j * angle)).ravel()
        )
        self.assertGreaterEqual(result.value, scan - 1e-4)

    def test_degree_range(self):
        with self.assertRaises(InvalidInputError):
            maximize(np.eye(3), 3, SMALL)
        with self.assertRaises(InvalidInputError):
            maximize(np.eye(3), 0, SMALL)


class Family4Tests(SimpleTestCase):

    def test_parameters(self):
        self.assertAlmostEqual(Family4Params(math.sqrt(2)).c, 1.0)
        self.assertEqual(Family4Params(0).c, 0.0)
        with self.assertRaises(InvalidInputError):
            Family4Params(-1.0)

    def test_spectrum(self):
        A = build_family4(Family4Params(1.0))
        assert_allclose(np.poly(A), [1, 0, 0, 0, -1], atol=1e-14)

    def test_experiment(self):
        records = family4_experiment([0, 1], n=2048, budget=SMALL, gap_tol=1e-6)
        normal, general = records
        self.assertTrue(normal.passed)
        self.assertEqual(normal.c, 1.0)
        self.assertAlmostEqual(normal.max_blaschke_value, 1.0, places=9)
        self.assertEqual(general.error, '')
        self.assertLessEqual(general.rotation_defect, 1e-6)
        self.assertLessEqual(general.phi_identity_residual, 1e-6)
        self.assertIn(general.grid_size, (2048, 4096, 8192))
        self.assertGreaterEqual(general.max_blaschke_value, general.max_power_value)
        self.assertFalse(general.counterexample)
