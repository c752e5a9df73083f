import math
import unittest

import numpy as np
from scipy.stats import unitary_group

from kicked_top_correlations.correlations import (
    BlochForm,
    CorrelationValues,
    MeasurementSetting,
    bloch_decompose,
    conditional_entropy_after_measurement,
    geometric_discord,
    mutual_information,
    optimal_measurement,
    quantum_discord,
    von_neumann_entropy,
)
from kicked_top_correlations.errors import CalculationError, ValidationError
from kicked_top_correlations.spin_algebra import SpinQuantumNumber, random_state
from kicked_top_correlations.symmetric_reduction import two_qubit_rdm

BELL = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def werner_state(p):
    return p * np.outer(SINGLET, SINGLET.conj()) + (1 - p) * np.eye(4) / 4


def werner_discord(p):
    return (
        (1 - p) / 4 * math.log(1 - p)
        - (1 + p) / 2 * math.log(1 + p)
        + (1 + 3 * p) / 4 * math.log(1 + 3 * p)
    )


def random_pair_state(seed):
    state = random_state(SpinQuantumNumber.from_j(4), np.random.default_rng(seed))
    return two_qubit_rdm(state).matrix


class TestEntropies(unittest.TestCase):

    def test_maximally_mixed_qubit(self):
        self.assertAlmostEqual(von_neumann_entropy(np.eye(2) / 2), math.log(2), delta=1e-12)

    def test_pure_state(self):
        self.assertAlmostEqual(von_neumann_entropy(np.outer(BELL, BELL.conj())), 0.0, delta=1e-12)

    def test_bell_mutual_information(self):
        self.assertAlmostEqual(mutual_information(np.outer(BELL, BELL.conj())), 2 * math.log(2), delta=1e-12)

    def test_rejects_invalid_matrices(self):
        with self.assertRaises(ValidationError):
            von_neumann_entropy(np.eye(2))
        with self.assertRaises(ValidationError):
            von_neumann_entropy(np.array([[0.5, 0.5], [0.0, 0.5]]))
        with self.assertRaises(ValidationError):
            quantum_discord(np.eye(2) / 2)


class TestQuantumDiscord(unittest.TestCase):

    def test_product_state(self):
        a = np.array([[0.8, 0.1], [0.1, 0.2]], dtype=complex)
        b = np.array([[0.3, 0.2j], [-0.2j, 0.7]], dtype=complex)
        product = np.kron(a, b)

        self.assertAlmostEqual(quantum_discord(product), 0.0, delta=1e-7)
        self.assertAlmostEqual(geometric_discord(product), 0.0, delta=1e-12)

    def test_bell_state(self):
        bell = np.outer(BELL, BELL.conj())

        self.assertAlmostEqual(quantum_discord(bell), math.log(2), delta=1e-7)
        self.assertAlmostEqual(geometric_discord(bell), 0.5, delta=1e-12)

    def test_werner_states(self):
        for p in (0.2, 0.5, 0.9):
            self.assertAlmostEqual(quantum_discord(werner_state(p)), werner_discord(p), delta=1e-6)
            self.assertAlmostEqual(geometric_discord(werner_state(p)), p**2 / 2, delta=1e-12)

    def test_classical_quantum_state(self):
        # sum_i p_i |i><i| (x) rho_i has zero discord when A is measured
        rho_0 = np.array([[0.9, 0.1], [0.1, 0.1]], dtype=complex)
        rho_1 = np.array([[0.2, -0.3j], [0.3j, 0.8]], dtype=complex)
        state = 0.4 * np.kron(np.diag([1, 0]), rho_0) + 0.6 * np.kron(np.diag([0, 1]), rho_1)

        self.assertAlmostEqual(quantum_discord(state), 0.0, delta=1e-7)
        self.assertAlmostEqual(geometric_discord(state), 0.0, delta=1e-12)

    def test_local_unitary_invariance(self):
        for seed in range(3):
            rho = random_pair_state(seed)
            local = np.kron(unitary_group.rvs(2, random_state=seed), unitary_group.rvs(2, random_state=seed + 10))
            rotated = local @ rho @ local.conj().T

            self.assertAlmostEqual(quantum_discord(rotated), quantum_discord(rho), delta=1e-6)
            self.assertAlmostEqual(geometric_discord(rotated), geometric_discord(rho), delta=1e-12)

    def test_lower_bound_on_geometric_discord(self):
        for seed in range(5):
            rho = random_pair_state(100 + seed)
            values = CorrelationValues(quantum_discord(rho), geometric_discord(rho), 0.0)
            self.assertTrue(values.satisfies_bound())


class TestMeasurement(unittest.TestCase):

    def test_vectorised_entropy_matches_projectors(self):
        rho = random_pair_state(7)
        setting, minimum = optimal_measurement(rho)

        self.assertAlmostEqual(conditional_entropy_after_measurement(rho, setting), minimum, delta=1e-9)
        for theta, phi in ((0.0, 0.0), (1.0, 2.0), (2.5, -1.0)):
            other = MeasurementSetting.from_angles(theta, phi)
            self.assertGreaterEqual(conditional_entropy_after_measurement(rho, other), minimum - 1e-9)

    def test_projectors_are_complete(self):
        setting = MeasurementSetting.from_angles(0.7, -2.0)
        plus, minus = setting.projectors()

        np.testing.assert_allclose(plus + minus, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(plus @ plus, plus, atol=1e-15)
        self.assertAlmostEqual(float(np.linalg.norm(setting.axis)), 1.0, delta=1e-15)

    def test_non_finite_angles(self):
        with self.assertRaises(ValidationError):
            MeasurementSetting.from_angles(float("nan"), 0.0)


class TestBlochForm(unittest.TestCase):

    def test_round_trip(self):
        rho = random_pair_state(3)
        np.testing.assert_allclose(bloch_decompose(rho).to_density_matrix(), rho, atol=1e-14)

    def test_bell_correlation_matrix(self):
        form = bloch_decompose(np.outer(BELL, BELL.conj()))

        np.testing.assert_allclose(form.x, np.zeros(3), atol=1e-15)
        np.testing.assert_allclose(form.t, np.diag([1.0, -1.0, 1.0]), atol=1e-15)

    def test_out_of_range_components(self):
        with self.assertRaises(ValidationError):
            BlochForm(np.array([2.0, 0.0, 0.0]), np.zeros(3), np.zeros((3, 3)))


class TestCorrelationValues(unittest.TestCase):

    def test_bound_violation(self):
        with self.assertRaises(CalculationError):
            CorrelationValues(discord=1.0, geometric_discord=0.1, q_measure=0.5).check_bound()

    def test_bound_holds(self):
        CorrelationValues(discord=1.0, geometric_discord=0.5, q_measure=1.0).check_bound()


if __name__ == "__main__":
    unittest.main()
