import numpy as np
from django.test import SimpleTestCase
from numpy.polynomial.polynomial import polyval
from numpy.testing import assert_allclose
from scipy.integrate import quad
from scipy.special import ellipkm1

from core.choi_family import WeightVector, build_matrix
from core.conformal import (
    EllipseMap, ellipse_scalars, eval_phi, eval_sigma, gamma_profile, map_scalars, solve_map,
)
from core.exceptions import DomainError, GeometryError, MapFailureError
from core.funcalc import contour_from_map
from core.numrange import angle_grid, boundary, circle_curve

from .curves import curve_from_series, rounded_square_series

SERIES = [0.0, 1.0, 0.0, 0.0, 0.1]
TURNED_SERIES = [0.0, 1.0, 0.0, 0.0, 0.1j]


class DiskTests(SimpleTestCase):

    def setUp(self):
        self.disk_map = solve_map(circle_curve(0.7, 256), 3)

    def test_scale(self):
        self.assertAlmostEqual(self.disk_map.c1, 0.7, places=14)
        self.assertLessEqual(self.disk_map.analyticity_defect, 1e-12)

    def test_sigma_and_phi(self):
        self.assertAlmostEqual(complex(eval_sigma(self.disk_map, 0.5)), 0.35, places=13)
        self.assertAlmostEqual(complex(eval_phi(self.disk_map, 0.35)), 0.5, places=12)

    def test_boundary_values(self):
        w = np.exp(1j * np.array([0.3, 2.0, 4.5]))
        assert_allclose(eval_sigma(self.disk_map, w), 0.7 * w, atol=1e-12)

    def test_domain_errors(self):
        with self.assertRaises(DomainError):
            eval_sigma(self.disk_map, 1.5)
        with self.assertRaises(DomainError):
            eval_phi(self.disk_map, 0.7)


class SeriesDomainTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.disk_map = solve_map(curve_from_series(SERIES, 1024), 3, max_iter=2000)

    def test_recovers_coefficients(self):
        coeffs = self.disk_map.coeffs
        assert_allclose(coeffs[:5], SERIES, atol=1e-8)
        self.assertLessEqual(np.max(np.abs(coeffs[5:])), 1e-8)
        self.assertAlmostEqual(self.disk_map.c1, 1.0, places=8)

    def test_threefold_pattern(self):
        self.assertLessEqual(self.disk_map.symmetry_defect, 1e-8)

    def test_round_trip(self):
        w = np.array([0.0, 0.3 + 0.2j, 0.6 * np.exp(2j), 0.95 * np.exp(-1j)])
        assert_allclose(eval_phi(self.disk_map, eval_sigma(self.disk_map, w)), w, atol=1e-8)

    def test_conjugate_symmetry(self):
        w = np.array([0.4 + 0.3j, 0.7 * np.exp(0.9j)])
        assert_allclose(eval_sigma(self.disk_map, w.conj()), eval_sigma(self.disk_map, w).conj(), atol=1e-10)


class RoundedSquareTests(SimpleTestCase):

    def test_leading_coefficients(self):
        coeffs, scale = rounded_square_series()
        disk_map = solve_map(curve_from_series(coeffs, 1024), 4, max_iter=3000, tol=1e-11)
        self.assertAlmostEqual(disk_map.c1 / scale, 1.0, places=7)
        self.assertAlmostEqual(disk_map.coeffs[5].real, coeffs[5], places=7)
        self.assertLessEqual(disk_map.symmetry_defect, 1e-7)


class ChoiMapTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.wv = WeightVector.of(1.2, 0.9, 0.8)
        cls.disk_map = solve_map(boundary(build_matrix(cls.wv), 2048), 3)

    def test_round_trip(self):
        w = np.array([0.1j, 0.5 * np.exp(1j), 0.85 * np.exp(-2.5j)])
        assert_allclose(eval_phi(self.disk_map, eval_sigma(self.disk_map, w)), w, atol=1e-8)

    def test_real_coefficients(self):
        self.assertLessEqual(np.max(np.abs(self.disk_map.coeffs.imag)), 1e-9)

    def test_scalars(self):
        scalars = map_scalars(self.disk_map, self.wv)
        self.assertIsInstance(scalars.c, float)
        self.assertGreater(scalars.c, 0.0)
        self.assertAlmostEqual(scalars.beta0, self.disk_map.c1)
        self.assertGreaterEqual(scalars.h0_at_lambda1, -1e-8)
        self.assertLessEqual(scalars.h0_at_lambda1, 1.0)
        self.assertIn(scalars.k_star, (1, 2))
        self.assertFalse(scalars.near_normal)

    def test_monotone_profile(self):
        rising, falling = gamma_profile(self.disk_map, 3, 200).monotonicity_defects()
        self.assertLessEqual(rising, 1e-9)
        self.assertLessEqual(falling, 1e-9)

    def test_iteration_limit(self):
        bc = boundary(build_matrix(self.wv), 256)
        with self.assertRaises(MapFailureError) as ctx:
            solve_map(bc, 3, max_iter=1)
        self.assertGreater(ctx.exception.defect, 0.0)


class TurnedSeriesTests(SimpleTestCase):
    """A domain without reflection symmetry, so the raw sigma'(0) is not real."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.disk_map = solve_map(curve_from_series(TURNED_SERIES, 1024), 3, max_iter=2000)

    def test_normalised_coefficients(self):
        assert_allclose(self.disk_map.coeffs[:5], TURNED_SERIES, atol=1e-8)
        self.assertAlmostEqual(self.disk_map.c1, 1.0, places=8)

    def test_boundary_branch_matches_series(self):
        w = np.exp(1j * np.array([0.05, 1.3, 2.71, 4.4, 6.0]))
        assert_allclose(eval_sigma(self.disk_map, w), polyval(w, TURNED_SERIES), atol=1e-8)

    def test_contour_nodes_match_sigma(self):
        contour = contour_from_map(self.disk_map, 1)
        assert_allclose(contour.nodes, eval_sigma(self.disk_map, np.exp(1j * contour.s)), atol=1e-10)
        assert_allclose(contour.nodes, polyval(np.exp(1j * contour.s), TURNED_SERIES), atol=1e-8)


class SharpSquareTests(SimpleTestCase):

    def test_leading_coefficient(self):
        # sigma(w) = C int_0^w (1 - z^4)^{-1/2} dz with sigma(1) = 1
        integral, _ = quad(lambda x: 1.0 / np.sqrt((1.0 + x) * (1.0 + x * x)), 0.0, 1.0,
                           weight='alg', wvar=(0.0, -0.5))
        disk_map = solve_map(boundary(np.diag([1, 1j, -1, -1j]), 4096), 4, max_iter=5000)
        self.assertAlmostEqual(disk_map.c1, 1.0 / integral, delta=1e-6)


class EllipseMapTests(SimpleTestCase):

    def setUp(self):
        self.wv = WeightVector.of(1.0, 0.2)
        self.ellipse = EllipseMap.for_weights(self.wv)

    def test_axes(self):
        self.assertAlmostEqual(self.ellipse.semi_major, 0.6)
        self.assertAlmostEqual(self.ellipse.semi_minor, 0.4)
        self.assertAlmostEqual(self.ellipse.focus, np.sqrt(0.2), places=14)

    def test_complete_integrals(self):
        # one ellipse on each side of the nome switch
        for a, b in ((0.6, 0.4), (1.0, 0.3), (1.0, 0.02), (1.0, 0.999)):
            with self.subTest(b=b):
                ellipse = EllipseMap.from_axes(a, b)
                self.assertAlmostEqual(ellipse.modulus ** 2 + ellipse.comodulus ** 2, 1.0, places=14)
                self.assertAlmostEqual(ellipse.quarter_period, ellipkm1(ellipse.comodulus ** 2), places=10)
                self.assertAlmostEqual(ellipse.co_quarter_period, ellipkm1(ellipse.modulus ** 2), places=10)
                self.assertAlmostEqual(ellipse.co_quarter_period / ellipse.quarter_period,
                                       4 * ellipse.eta / np.pi, places=12)

    def test_boundary_goes_to_circle(self):
        u = angle_grid(256)
        values = self.ellipse.boundary_phi(u)
        assert_allclose(np.abs(values), 1.0, atol=1e-12)
        assert_allclose(self.ellipse.phi(self.ellipse.nodes(u)), values, atol=1e-10)
        assert_allclose(np.abs(self.ellipse.nodes(u)), self.ellipse.rho(np.angle(self.ellipse.nodes(u))),
                        atol=1e-14)

    def test_normalisation(self):
        self.assertEqual(complex(self.ellipse.phi(0.0)), 0.0)
        self.assertAlmostEqual(complex(self.ellipse.phi(self.ellipse.focus)), np.sqrt(self.ellipse.modulus))
        self.assertAlmostEqual(complex(self.ellipse.boundary_phi(0.0)), 1.0, places=12)

    def test_agrees_with_boundary_correspondence(self):
        disk_map = solve_map(boundary(build_matrix(self.wv), 2048), 2)
        self.assertAlmostEqual(disk_map.c1, self.ellipse.c1, delta=1e-8)
        focus = self.ellipse.focus
        self.assertAlmostEqual(complex(eval_phi(disk_map, focus)), complex(self.ellipse.phi(focus)), delta=1e-8)
        self.assertAlmostEqual(map_scalars(disk_map, self.wv).c, ellipse_scalars(self.ellipse, self.wv).c,
                               delta=1e-8)

    def test_scalars(self):
        scalars = ellipse_scalars(self.ellipse, self.wv)
        self.assertEqual(scalars.k_star, 1)
        self.assertAlmostEqual(scalars.lambda1, self.ellipse.focus)
        self.assertAlmostEqual(scalars.h0_at_lambda1, 1 - np.pi / (2 * self.ellipse.quarter_period), places=14)
        self.assertGreater(scalars.h0_at_lambda1, 0.0)
        self.assertFalse(scalars.near_normal)

    def test_near_normal(self):
        wv = WeightVector.of(1.0, 0.999)
        self.assertTrue(ellipse_scalars(EllipseMap.for_weights(wv), wv).near_normal)

    def test_degenerate(self):
        with self.assertRaises(GeometryError):
            EllipseMap.from_axes(0.4, 0.6)
        with self.assertRaises(GeometryError):
            EllipseMap.for_weights(WeightVector.of(1.0, 0.0))
        with self.assertRaises(GeometryError):
            EllipseMap.for_weights(WeightVector.of(1.0, 0.5, 0.2))


class DiskRadiusScalarsTests(SimpleTestCase):

    def test_nilpotent_chain(self):
        wv = WeightVector.of(1, 1, 0)
        scalars = map_scalars(None, wv, disk_radius=np.sqrt(2) / 2)
        self.assertAlmostEqual(scalars.c, np.sqrt(2))
        self.assertEqual(scalars.k_star, 2)
        self.assertEqual(scalars.h0_at_lambda1, 0.0)
