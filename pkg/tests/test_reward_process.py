"""
Tests for variable-reward renewal effective capacity
"""

import math
import unittest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.capacity.errors import InvalidDistribution
from src.capacity.renewal_core import (
    InterarrivalPmf,
    approx_constant,
    bounds_constant,
)
from src.capacity.reward_process import (
    RewardTable,
    approx_variable,
    bounds_variable,
    coefficients_a,
    effective_capacity_variable,
    ltat,
    minimum_reward_entry,
    solve_zeta_variable,
    solve_zeta_variable_continuous,
    table_joint_evaluator,
)
from tests.fixtures import random_table

QUADRATIC_ZETA = (-1.0 + math.sqrt(1.0 + 8.0 * math.e)) / 2.0
E = math.e


class TestRewardTable(unittest.TestCase):
    """Validation and summary statistics"""

    def test_rejects_duplicate_state(self):
        with self.assertRaises(InvalidDistribution):
            RewardTable.from_rows([(1, "S", 0.5, 1.0), (1, "S", 0.5, 2.0)])

    def test_rejects_zero_interarrival(self):
        with self.assertRaises(InvalidDistribution):
            RewardTable.from_rows([(0, "S", 1.0, 1.0)])

    def test_rejects_bad_sum(self):
        with self.assertRaises(InvalidDistribution):
            RewardTable.from_rows([(1, "S", 0.5, 1.0), (2, "S", 0.4, 2.0)])

    def test_rejects_negative_reward(self):
        with self.assertRaises(InvalidDistribution):
            RewardTable.from_rows([(1, "S", 1.0, -1.0)])

    def test_zero_probability_entry_does_not_set_K(self):
        table = RewardTable.from_rows([(1, "S", 1.0, 1.0), (4, "F", 0.0, 0.0)])
        self.assertEqual(table.K, 1)

    def test_from_pmf(self):
        table = RewardTable.from_pmf(InterarrivalPmf.from_mapping({1: 0.5, 2: 0.5}), 1.0)
        self.assertEqual(table.to_rows(), [(1, "S", 0.5, 1.0), (2, "S", 0.5, 1.0)])
        self.assertEqual(table.interarrival_pmf().probs, (0.0, 0.5, 0.5))

    def test_from_pmf_rejects_zero_interarrival(self):
        with self.assertRaises(InvalidDistribution):
            RewardTable.from_pmf(InterarrivalPmf((0.5, 0.5)), 1.0)


class TestVariableReward(unittest.TestCase):
    """Hand-evaluated examples"""

    def setUp(self):
        self.outage_like = RewardTable.from_rows(
            [(1, "S", 0.6, 1.0), (2, "S", 0.3, 1.0), (2, "F", 0.1, 0.0)]
        )

    def test_coefficients(self):
        single = RewardTable.from_rows([(1, "S", 1.0, 2.0)])
        np.testing.assert_allclose(coefficients_a(single, 1.0), [math.exp(-2.0)], rtol=1e-15)
        np.testing.assert_allclose(
            coefficients_a(self.outage_like, 1.0), [0.6 / E, 0.3 / E + 0.1], rtol=1e-14
        )

    def test_coefficients_theta_zero_is_pmf(self):
        np.testing.assert_allclose(coefficients_a(self.outage_like, 0.0), [0.6, 0.4], rtol=1e-15)

    def test_single_entry(self):
        table = RewardTable.from_rows([(1, "S", 1.0, 1.5)])
        self.assertAlmostEqual(solve_zeta_variable(table, 2.0), math.exp(3.0), places=8)

    def test_all_rewards_zero(self):
        table = RewardTable.from_rows([(1, "S", 0.5, 0.0), (3, "F", 0.5, 0.0)])
        self.assertEqual(solve_zeta_variable(table, 1.0), 1.0)
        self.assertEqual(effective_capacity_variable(table, 1.0).capacity, 0.0)

    def test_constant_table_matches_constant_reward(self):
        table = RewardTable.from_rows([(1, "S", 0.5, 1.0), (2, "S", 0.5, 1.0)])
        self.assertAlmostEqual(solve_zeta_variable(table, 1.0), QUADRATIC_ZETA, places=10)

    def test_quadratic_oracle(self):
        """0.6/e x + (0.3/e + 0.1) x^2 = 1"""
        b, a = 0.6 / E, 0.3 / E + 0.1
        root = (-b + math.sqrt(b * b + 4.0 * a)) / (2.0 * a)
        result = effective_capacity_variable(self.outage_like, 1.0)
        self.assertAlmostEqual(result.zeta, root, places=10)
        self.assertAlmostEqual(result.capacity, math.log(root), places=10)

    def test_ltat(self):
        self.assertEqual(ltat(RewardTable.from_rows([(1, "S", 1.0, 3.0)])), 3.0)
        table = RewardTable.from_rows([(1, "S", 0.5, 2.0), (2, "S", 0.5, 2.0)])
        self.assertAlmostEqual(ltat(table), 4.0 / 3.0, places=12)

    def test_approx_matches_constant_reward(self):
        pmf = InterarrivalPmf.from_mapping({1: 0.2, 3: 0.3, 5: 0.5})
        table = RewardTable.from_pmf(pmf, 2.5)
        for theta in (0.0, 0.01, 1.0):
            self.assertAlmostEqual(approx_variable(table, theta), approx_constant(pmf, 2.5, theta), places=12)

    def test_approx_hand_value(self):
        """E{(2 * 1.5 - 2X)^2} = 0.5 * 1 + 0.5 * 1 = 1"""
        table = RewardTable.from_rows([(1, "S", 0.5, 2.0), (2, "S", 0.5, 2.0)])
        expected = 4.0 / 3.0 - 0.01 * 1.0 / (2.0 * 3.375)
        self.assertAlmostEqual(approx_variable(table, 0.01), expected, places=12)

    def test_outage_bounds(self):
        """Zero-reward failure state pins the lower bound to zero"""
        lower, upper = bounds_variable(self.outage_like, 1e4)
        self.assertEqual(lower, 0.0)
        self.assertAlmostEqual(upper, -math.log(0.1) / (2 * 1e4), places=12)
        result = effective_capacity_variable(self.outage_like, 1e4)
        self.assertLessEqual(result.capacity, upper + 1e-12)

    def test_constant_bounds_reduce(self):
        pmf = InterarrivalPmf.from_mapping({1: 0.5, 2: 0.5})
        table = RewardTable.from_pmf(pmf, 1.0)
        lower, upper = bounds_variable(table, 1.0)
        expected = bounds_constant(pmf, 1.0, 1.0)
        self.assertAlmostEqual(lower, expected[0], places=12)
        self.assertAlmostEqual(upper, expected[1], places=12)

    def test_minimum_reward_tie_break(self):
        """Equal rewards go to the smaller interarrival"""
        table = RewardTable.from_rows([(3, "A", 0.5, 1.0), (2, "B", 0.25, 1.0), (2, "C", 0.25, 1.0)])
        self.assertEqual(minimum_reward_entry(table).state, "B")

    def test_theta_zero(self):
        result = effective_capacity_variable(self.outage_like, 0.0)
        self.assertEqual(result.capacity, result.ltat)
        self.assertAlmostEqual(result.ltat, 0.9 / 1.4, places=12)


class TestVariableRewardProperties(unittest.TestCase):
    """Monotonicity, bounds, limits and lattice scaling over random tables"""

    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(7)
        cls.tables = [random_table(rng) for _ in range(100)]
        cls.thetas = np.logspace(-4, 3, 50)

    def test_non_increasing_and_bounded(self):
        for table in self.tables:
            previous = math.inf
            for theta in self.thetas:
                result = effective_capacity_variable(table, theta)
                slack = 1e-9 * max(1.0, result.capacity)
                self.assertLessEqual(result.capacity, previous + slack)
                self.assertGreaterEqual(result.capacity, result.lower_bound - slack)
                self.assertLessEqual(result.capacity, result.upper_bound + slack)
                previous = result.capacity

    def test_small_theta_reaches_ltat(self):
        for table in self.tables:
            result = effective_capacity_variable(table, 1e-8)
            if result.ltat > 0.0:
                self.assertLess(abs(result.capacity - result.ltat) / result.ltat, 1e-4)

    def test_lattice_scaling(self):
        """k -> ck divides the capacity by c; scaling R and theta as well leaves it unchanged"""
        c = 3
        for table in self.tables[:30]:
            stretched = RewardTable.from_rows([(k * c, s, p, r) for k, s, p, r in table.to_rows()])
            both = RewardTable.from_rows([(k * c, s, p, r * c) for k, s, p, r in table.to_rows()])
            for theta in (1e-3, 0.1, 1.0, 10.0):
                base = effective_capacity_variable(table, theta).capacity
                self.assertAlmostEqual(
                    c * effective_capacity_variable(stretched, theta).capacity, base,
                    delta=1e-9 * max(1.0, base),
                )
                self.assertAlmostEqual(
                    effective_capacity_variable(both, theta / c).capacity, base,
                    delta=1e-9 * max(1.0, base),
                )


class TestContinuousVariable(unittest.TestCase):
    """Continuous renewal reward extension"""

    def test_degenerate(self):
        def evaluator(theta, u):
            return u - theta * 2.0

        self.assertAlmostEqual(solve_zeta_variable_continuous(evaluator, 0.5), math.e, places=9)

    def test_theta_zero(self):
        self.assertEqual(solve_zeta_variable_continuous(lambda theta, u: u, 0.0), 1.0)

    def test_table_evaluator_matches_discrete(self):
        table = RewardTable.from_rows([(1, "S", 0.6, 1.0), (2, "S", 0.3, 1.0), (2, "F", 0.1, 0.0)])
        zeta = solve_zeta_variable_continuous(
            table_joint_evaluator(table), 1.0,
            mean_interarrival=table.mean_interarrival(), mean_reward=table.mean_reward(),
        )
        self.assertAlmostEqual(zeta, solve_zeta_variable(table, 1.0), places=9)

    def test_refinement_converges(self):
        """A continuous law seen on finer ticks approaches the continuous root"""
        lam, reward, theta = 1.0, 1.0, 0.5

        def exact_evaluator(th, u):
            if u >= lam:
                return math.inf
            return -math.log1p(-u / lam) - th * reward

        exact = math.log(solve_zeta_variable_continuous(exact_evaluator, theta, 1.0 / lam, reward))
        errors = []
        for dx in (1.0, 0.5, 0.25):
            ks = np.arange(1, int(40 / dx) + 1)
            probs = np.exp(-lam * (ks - 1) * dx) - np.exp(-lam * ks * dx)
            probs[-1] += math.exp(-lam * ks[-1] * dx)
            table = RewardTable.from_rows([(int(k), "S", float(p), reward) for k, p in zip(ks, probs)])
            per_unit = effective_capacity_variable(table, theta).log_zeta / dx
            errors.append(abs(per_unit - exact))
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[2], errors[1])


if __name__ == '__main__':
    unittest.main()
