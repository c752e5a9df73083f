import math
import unittest

import numpy as np

from kicked_top_correlations.constants import PaperDefaults
from kicked_top_correlations.errors import ValidationError
from kicked_top_correlations.spin_algebra import (
    SpinQuantumNumber,
    basis_state,
    coherent_state,
    random_state,
)
from kicked_top_correlations.symmetric_reduction import (
    OneQubitDensityMatrix,
    TwoQubitDensityMatrix,
    brute_force_rdm_oracle,
    clip_density_matrix,
    dicke_split_coefficients,
    dicke_weight_table,
    expand_to_qubits,
    one_qubit_rdm,
    partial_trace,
    two_qubit_rdm,
)


class TestOracleEquivalence(unittest.TestCase):

    def test_random_states_match_brute_force(self):
        rng = np.random.default_rng(2024)
        for twice_j in range(2, 11):
            spin = SpinQuantumNumber(twice_j)
            for _ in range(3):
                state = random_state(spin, rng)
                single, pair = brute_force_rdm_oracle(state)
                np.testing.assert_allclose(two_qubit_rdm(state).matrix, pair.matrix, atol=1e-12)
                np.testing.assert_allclose(one_qubit_rdm(state).matrix, single.matrix, atol=1e-12)

    def test_coherent_state_matches_brute_force(self):
        state = coherent_state(SpinQuantumNumber.from_j(4), *PaperDefaults.CHAOTIC_PROBE)
        _, pair = brute_force_rdm_oracle(state)
        np.testing.assert_allclose(two_qubit_rdm(state).matrix, pair.matrix, atol=1e-12)

    def test_expansion_is_normalised(self):
        state = random_state(SpinQuantumNumber(6), np.random.default_rng(1))
        vector = expand_to_qubits(state)

        self.assertEqual(vector.shape, (64,))
        self.assertAlmostEqual(float(np.linalg.norm(vector)), 1.0, delta=1e-12)

    def test_expansion_limit(self):
        state = basis_state(SpinQuantumNumber(15), 0.5)
        with self.assertRaises(ValidationError):
            expand_to_qubits(state)


class TestReducedStates(unittest.TestCase):

    def test_coherent_state_bloch_vector(self):
        theta, phi = 1.1, -2.0
        state = coherent_state(SpinQuantumNumber.from_j(25), theta, phi)
        expected = [
            math.sin(theta) * math.cos(phi),
            math.sin(theta) * math.sin(phi),
            math.cos(theta),
        ]
        rho = one_qubit_rdm(state)

        np.testing.assert_allclose(rho.bloch_vector, expected, atol=1e-10)
        self.assertAlmostEqual(rho.purity, 1.0, delta=1e-10)

    def test_coherent_pair_is_product(self):
        state = coherent_state(SpinQuantumNumber.from_j(10), 0.8, 0.3)
        pair = two_qubit_rdm(state).matrix
        single = one_qubit_rdm(state).matrix
        np.testing.assert_allclose(pair, np.kron(single, single), atol=1e-10)

    def test_dicke_state_populations(self):
        # |j, m> has j + m of its 2j qubits up
        state = basis_state(SpinQuantumNumber.from_j(2), 1)
        rho = one_qubit_rdm(state)
        self.assertAlmostEqual(rho.matrix[0, 0].real, 0.75, delta=1e-12)

        pair = two_qubit_rdm(state)
        self.assertAlmostEqual(pair.matrix[0, 0].real, 0.5, delta=1e-12)
        self.assertAlmostEqual(pair.matrix[3, 3].real, 0.0, delta=1e-12)

    def test_pair_is_symmetric(self):
        state = random_state(SpinQuantumNumber.from_j(12), np.random.default_rng(9))
        pair = two_qubit_rdm(state)

        self.assertAlmostEqual(pair.singlet_population, 0.0, delta=1e-12)
        np.testing.assert_allclose(pair.swapped(), pair.matrix, atol=1e-12)
        np.testing.assert_allclose(pair.marginal(0).matrix, pair.marginal(1).matrix, atol=1e-12)
        self.assertGreater(pair.min_eigenvalue, -1e-12)

    def test_single_qubit_top_has_no_pair(self):
        state = basis_state(SpinQuantumNumber(1), 0.5)
        with self.assertRaises(ValidationError):
            two_qubit_rdm(state)
        self.assertAlmostEqual(one_qubit_rdm(state).purity, 1.0, delta=1e-12)


class TestDickeWeights(unittest.TestCase):

    def test_split_coefficients(self):
        weights = dict(dicke_split_coefficients(4, 2))

        self.assertAlmostEqual(weights[0], 1 / 6, delta=1e-15)
        self.assertAlmostEqual(weights[1], 4 / 6, delta=1e-15)
        self.assertAlmostEqual(weights[2], 1 / 6, delta=1e-15)

    def test_split_coefficients_sum_to_one(self):
        for excitations in range(8):
            total = sum(weight for _, weight in dicke_split_coefficients(7, excitations))
            self.assertAlmostEqual(total, 1.0, delta=1e-14)

    def test_table_matches_exact_weights(self):
        table = dicke_weight_table(9)
        for excitations in range(10):
            for q, weight in dicke_split_coefficients(9, excitations):
                self.assertAlmostEqual(table[excitations, q] ** 2, weight, delta=1e-14)

    def test_invalid_arguments(self):
        with self.assertRaises(ValidationError):
            dicke_split_coefficients(1, 0)
        with self.assertRaises(ValidationError):
            dicke_split_coefficients(4, 5)


class TestDensityMatrixHelpers(unittest.TestCase):

    def test_partial_trace_of_product(self):
        a = np.array([[0.7, 0.2], [0.2, 0.3]], dtype=complex)
        b = np.array([[0.4, -0.1j], [0.1j, 0.6]], dtype=complex)
        product = np.kron(a, b)

        np.testing.assert_allclose(partial_trace(product, 0), a, atol=1e-15)
        np.testing.assert_allclose(partial_trace(product, 1), b, atol=1e-15)
        with self.assertRaises(ValidationError):
            partial_trace(product, 2)

    def test_clip_removes_small_negativity(self):
        matrix = np.diag([1.0 + 1e-12, -1e-12]).astype(complex)
        eigenvalues, clipped = clip_density_matrix(matrix)

        self.assertGreaterEqual(eigenvalues.min(), 0.0)
        self.assertAlmostEqual(float(np.trace(clipped).real), 1.0, delta=1e-15)

    def test_clip_rejects_negative_state(self):
        with self.assertRaises(ValidationError):
            clip_density_matrix(np.diag([1.1, -0.1]).astype(complex))

    def test_density_matrix_checks(self):
        with self.assertRaises(ValidationError):
            OneQubitDensityMatrix(np.eye(2))
        with self.assertRaises(ValidationError):
            OneQubitDensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
        with self.assertRaises(ValidationError):
            TwoQubitDensityMatrix(np.eye(2) / 2)
        with self.assertRaises(ValidationError):
            OneQubitDensityMatrix(np.diag([1.5, -0.5]))


if __name__ == "__main__":
    unittest.main()
