"""
Tests for the finite-time moment generating function
"""

import math
import unittest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.capacity.errors import CoincidentRoots, InvalidDistribution, TooLarge
from src.capacity.finite_time import (
    companion_roots,
    dominant_root,
    effective_capacity_finite,
    phi_determinant,
    phi_enumeration,
    phi_recursion,
)
from src.capacity.reward_process import RewardTable, effective_capacity_variable, solve_zeta_variable
from tests.fixtures import random_table

E = math.e


class TestFiniteTimeExamples(unittest.TestCase):
    """Hand-expanded values for a two-tick table"""

    def setUp(self):
        self.table = RewardTable.from_rows([(1, "S", 0.6, 1.0), (2, "S", 0.4, 2.0)])

    def test_phi_zero_is_one(self):
        self.assertEqual(phi_enumeration(self.table, 1.0, 0), 1.0)
        self.assertEqual(phi_recursion(self.table, 1.0, 0)[0], 1.0)

    def test_enumeration_by_hand(self):
        """Paths through t = 2: two short renewals, one short plus a pending one, one long"""
        expected = 0.36 / E ** 2 + 0.6 / E * 0.4 + 0.4 / E ** 2
        self.assertAlmostEqual(phi_enumeration(self.table, 1.0, 2), expected, places=14)
        self.assertAlmostEqual(phi_recursion(self.table, 1.0, 2)[2], expected, places=14)

    def test_enumeration_matches_recursion(self):
        series = phi_recursion(self.table, 1.0, 12)
        for t in range(13):
            value = phi_enumeration(self.table, 1.0, t)
            self.assertLess(abs(value - series[t]) / series[t], 1e-12)

    def test_determinant_matches_recursion(self):
        series = phi_recursion(self.table, 1.0, 10)
        for t in range(2, 11):
            for method in ("residue", "determinant"):
                value = phi_determinant(self.table, 1.0, t, method=method)
                self.assertLess(abs(value - series[t]) / series[t], 1e-8)

    def test_determinant_needs_t_at_least_K(self):
        with self.assertRaises(InvalidDistribution):
            phi_determinant(self.table, 1.0, 1)

    def test_theta_zero(self):
        """Without discounting phi is identically one"""
        series = phi_recursion(self.table, 0.0, 8)
        np.testing.assert_allclose(series.values, np.ones(9), rtol=1e-14)

    def test_series_is_valid(self):
        series = phi_recursion(self.table, 0.7, 50)
        self.assertTrue(series.is_valid())
        self.assertEqual(series.T, 50)

    def test_enumeration_guard(self):
        with self.assertRaises(TooLarge):
            phi_enumeration(self.table, 1.0, 40, max_terms=100)

    def test_finite_capacity(self):
        value = effective_capacity_finite(self.table, 1.0, 2)
        self.assertAlmostEqual(value, -math.log(phi_enumeration(self.table, 1.0, 2)) / 2.0, places=12)
        with self.assertRaises(InvalidDistribution):
            effective_capacity_finite(self.table, 1.0, 0)
        with self.assertRaises(InvalidDistribution):
            effective_capacity_finite(self.table, 0.0, 5)

    def test_long_horizon_no_underflow(self):
        """Log-domain values stay finite where phi itself underflows"""
        series = phi_recursion(self.table, 50.0, 100)
        self.assertTrue(np.all(np.isfinite(series.log_values)))
        self.assertGreater(series.capacity(100), 0.0)


class TestCharacteristicRoots(unittest.TestCase):

    def test_companion_roots(self):
        """z^2 - 0.5 z - 0.5 has roots 1 and -0.5"""
        roots = np.sort(companion_roots(np.array([0.5, 0.5])).real)
        np.testing.assert_allclose(roots, [-0.5, 1.0], atol=1e-14)

    def test_dominant_root_is_reciprocal_zeta(self):
        table = RewardTable.from_rows([(1, "S", 0.6, 1.0), (2, "S", 0.3, 1.0), (2, "F", 0.1, 0.0)])
        z = dominant_root(table, 1.0)
        self.assertAlmostEqual(z.imag, 0.0, places=12)
        self.assertAlmostEqual(1.0 / z.real, solve_zeta_variable(table, 1.0), places=9)

    def test_coincident_roots(self):
        """Roots 1 and -0.5 sit closer than the requested separation"""
        table = RewardTable.from_rows([(1, "S", 0.5, 0.0), (2, "S", 0.5, 0.0)])
        with self.assertRaises(CoincidentRoots):
            phi_determinant(table, 1.0, 5, separation=2.0)


class TestOracleAgreement(unittest.TestCase):
    """Enumeration, recursion and closed form agree on random tables"""

    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(1234)
        cls.small = [random_table(rng, max_k=3) for _ in range(50)]
        cls.large = [random_table(rng, max_k=4) for _ in range(50)]
        cls.thetas = rng.uniform(0.05, 2.0, size=50)

    def test_enumeration_agreement(self):
        for table, theta in zip(self.small, self.thetas):
            series = phi_recursion(table, theta, 12)
            for t in range(13):
                value = phi_enumeration(table, theta, t)
                self.assertLess(abs(value - series[t]) / series[t], 1e-12)

    def test_three_routes_agree(self):
        checked = 0
        for table, theta in zip(self.small + self.large, np.concatenate((self.thetas, self.thetas))):
            try:
                closed = [phi_determinant(table, theta, t) for t in range(table.K, 13)]
            except CoincidentRoots:
                continue
            for t, value in zip(range(table.K, 13), closed):
                enumerated = phi_enumeration(table, theta, t)
                self.assertLess(abs(value - enumerated) / enumerated, 1e-8)
            checked += 1
        self.assertGreaterEqual(checked, 50)

    def test_closed_form_agreement(self):
        checked = 0
        for table, theta in zip(self.small + self.large, np.concatenate((self.thetas, self.thetas))):
            horizon = 20 if table.K <= 3 else 30
            series = phi_recursion(table, theta, horizon)
            try:
                for t in range(table.K, horizon + 1):
                    value = phi_determinant(table, theta, t)
                    self.assertLess(abs(value - series[t]) / series[t], 1e-8)
            except CoincidentRoots:
                continue
            checked += 1
        self.assertGreaterEqual(checked, 50)

    def test_convergence_to_asymptotic_capacity(self):
        table = next(t for t in self.small if t.K == 3)
        series = phi_recursion(table, 1.0, 10_000)
        limit = effective_capacity_variable(table, 1.0).capacity
        self.assertLess(abs(series.capacity(10_000) - limit), 1e-3)


if __name__ == '__main__':
    unittest.main()
