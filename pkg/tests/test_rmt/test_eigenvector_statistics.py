import unittest

import numpy as np
import sympy as sp

from kicked_top_correlations.correlations import QNormalization
from kicked_top_correlations.errors import ValidationError
from kicked_top_correlations.rmt import (
    Ensemble,
    EigenvectorSource,
    analytic_q_average,
    analytic_q_average_exact,
    component_moment_check,
    eigenvector_q_statistics,
    ensemble_collective_averages,
    haar_q_exact,
    haar_q_reference,
    verify_summation_identities,
)


class TestAnalyticAverage(unittest.TestCase):

    def test_exact_values(self):
        self.assertEqual(analytic_q_average_exact(1), sp.Rational(103, 135))
        self.assertEqual(analytic_q_average_exact(1, QNormalization.QUBIT), sp.Rational(7, 15))

    def test_single_qubit(self):
        self.assertEqual(analytic_q_average_exact(0.5, QNormalization.QUBIT), 0)

    def test_approaches_one(self):
        self.assertAlmostEqual(analytic_q_average(400), 1.0, delta=2e-3)
        self.assertLess(analytic_q_average(10), analytic_q_average(100))

    def test_float_matches_exact(self):
        self.assertAlmostEqual(
            analytic_q_average(7.5, QNormalization.QUBIT),
            float(1 - sp.Rational(4) * sp.Rational(17, 2) / (3 * sp.Rational(15, 2) * 18)),
            delta=1e-15,
        )


class TestEigenvectorStatistics(unittest.TestCase):

    def test_real_unit_vectors_match_analytic_average(self):
        statistics = eigenvector_q_statistics(
            EigenvectorSource.REAL_UNIT_VECTORS, 3, n_samples=4000, seed=3
        )

        self.assertEqual(statistics.n_vectors, 4000)
        self.assertLessEqual(abs(statistics.mean - analytic_q_average(3)), 4 * statistics.stderr)

    def test_coe_samples(self):
        statistics = eigenvector_q_statistics("coe_samples", 5, n_samples=20, seed=1)

        self.assertEqual(statistics.n_matrices, 20)
        self.assertEqual(statistics.n_vectors, 220)
        self.assertIsNone(statistics.sector_means)
        self.assertGreater(statistics.stderr, 0.0)
        self.assertAlmostEqual(statistics.mean, analytic_q_average(5), delta=0.05)

    def test_parity_resolved_block_coe(self):
        statistics = eigenvector_q_statistics(
            "coe_samples", 4, n_samples=5, ensemble=Ensemble.BLOCK_COE, parity_resolved=True
        )

        self.assertEqual(set(statistics.sector_means), {"+", "-"})
        self.assertEqual(statistics.n_vectors, 45)

    def test_block_coe_eigenvectors_are_fully_entangled(self):
        # real parity eigenstates have <J> = 0
        statistics = eigenvector_q_statistics(
            "coe_samples", 4, n_samples=5, ensemble=Ensemble.BLOCK_COE, parity_resolved=True
        )

        self.assertAlmostEqual(statistics.mean, 1.0, delta=1e-9)
        for mean in statistics.sector_means.values():
            self.assertAlmostEqual(mean, 1.0, delta=1e-9)

    def test_floquet_eigenvectors_match_analytic_average(self):
        statistics = eigenvector_q_statistics(
            "floquet_k_range", 10, p=1.7, k_values=np.linspace(10.0, 1000.0, 50)
        )

        self.assertEqual(statistics.n_matrices, 50)
        self.assertAlmostEqual(statistics.mean, analytic_q_average(10), delta=0.01)

    def test_floquet_operators(self):
        statistics = eigenvector_q_statistics("floquet_k_range", 4, k_values=[10.0, 20.0])

        self.assertEqual(statistics.n_matrices, 2)
        self.assertEqual(statistics.n_vectors, 18)
        self.assertTrue(0.0 <= statistics.mean <= 1.0)

    def test_no_matrices(self):
        with self.assertRaises(ValidationError):
            eigenvector_q_statistics("floquet_k_range", 4, k_values=[])

    def test_unknown_source(self):
        with self.assertRaises(ValueError):
            eigenvector_q_statistics("spectral", 4)


class TestEnsembleMoments(unittest.TestCase):

    def test_component_moments(self):
        for j in (1, 10, 50):
            fourth, cross = component_moment_check(j, 20000, seed=j)
            dim = 2 * j + 1

            self.assertAlmostEqual(fourth.expected, 3 / (dim * (dim + 2)), delta=1e-15)
            self.assertAlmostEqual(cross.expected, 1 / (dim * (dim + 2)), delta=1e-15)
            self.assertTrue(fourth.within(4.0))
            self.assertTrue(cross.within(4.0))

    def test_component_moments_need_samples(self):
        with self.assertRaises(ValidationError):
            component_moment_check(2, 999)

    def test_collective_averages(self):
        sz_squared, plus_minus = ensemble_collective_averages(5, 20000, seed=2)

        self.assertAlmostEqual(sz_squared.expected, 60 / 39, delta=1e-12)
        self.assertTrue(sz_squared.within(4.0))
        self.assertTrue(plus_minus.within(4.0))

    def test_summation_identities(self):
        self.assertEqual(verify_summation_identities(200), [])


class TestHaarReference(unittest.TestCase):

    def test_exact_average(self):
        self.assertAlmostEqual(haar_q_exact(1), 0.0, delta=1e-15)
        self.assertAlmostEqual(haar_q_exact(4), 1 - 3 / 17, delta=1e-15)

    def test_monte_carlo(self):
        estimate, exact = haar_q_reference(4, 2000, seed=8)

        self.assertAlmostEqual(estimate.expected, 1 - 3 / 16, delta=1e-15)
        self.assertLessEqual(abs(estimate.mean - exact), 4 * estimate.stderr)

    def test_qubit_range(self):
        with self.assertRaises(ValidationError):
            haar_q_reference(13, 10)
        with self.assertRaises(ValidationError):
            haar_q_reference(0, 10)
        with self.assertRaises(ValidationError):
            haar_q_reference(3, 1)


if __name__ == "__main__":
    unittest.main()
