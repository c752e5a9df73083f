import math
import unittest

import numpy as np

from kicked_top_correlations.correlations import (
    QNormalization,
    correlation_values,
    q_measure,
    q_measure_collective,
)
from kicked_top_correlations.errors import ValidationError
from kicked_top_correlations.spin_algebra import (
    SpinQuantumNumber,
    basis_state,
    coherent_state,
    random_state,
)


class TestQMeasure(unittest.TestCase):

    def test_coherent_states_are_unentangled(self):
        for j, theta, phi in ((1, 0.4, 0.1), (25, math.pi / 2, -math.pi / 2), (60, 1.6707, -1.3707)):
            state = coherent_state(SpinQuantumNumber.from_j(j), theta, phi)
            self.assertAlmostEqual(q_measure(state), 0.0, delta=1e-10)

    def test_two_qubit_symmetric_bell_state(self):
        # |1, 0> is (|ud> + |du>)/sqrt(2)
        state = basis_state(SpinQuantumNumber.from_j(1), 0)
        self.assertAlmostEqual(q_measure(state), 1.0, delta=1e-12)

    def test_dicke_state(self):
        # rho_1 = diag(kappa/N, 1 - kappa/N)
        state = basis_state(SpinQuantumNumber.from_j(3), 1)
        up = 4 / 6
        self.assertAlmostEqual(q_measure(state), 2 * (1 - up**2 - (1 - up) ** 2), delta=1e-12)

    def test_collective_form_matches_reduced_state(self):
        rng = np.random.default_rng(17)
        for j in (0.5, 1, 3.5, 20):
            state = random_state(SpinQuantumNumber.from_j(j), rng)
            self.assertAlmostEqual(
                q_measure_collective(state, QNormalization.QUBIT), q_measure(state), delta=1e-12
            )

    def test_single_qubit_normalizations(self):
        state = basis_state(SpinQuantumNumber.from_j(0.5), 0.5)

        self.assertAlmostEqual(q_measure_collective(state, QNormalization.QUBIT), 0.0, delta=1e-12)
        self.assertAlmostEqual(q_measure_collective(state, QNormalization.DIMENSION), 0.75, delta=1e-12)
        self.assertAlmostEqual(q_measure_collective(state, "paper_2jplus1"), 0.75, delta=1e-12)

    def test_dimension_normalization_is_larger(self):
        state = random_state(SpinQuantumNumber.from_j(10), np.random.default_rng(4))
        self.assertGreaterEqual(
            q_measure_collective(state, QNormalization.DIMENSION),
            q_measure_collective(state, QNormalization.QUBIT),
        )


class TestCorrelationValues(unittest.TestCase):

    def test_coherent_state(self):
        state = coherent_state(SpinQuantumNumber.from_j(10), 1.0, 0.5)
        values = correlation_values(state)

        self.assertAlmostEqual(values.discord, 0.0, delta=1e-6)
        self.assertAlmostEqual(values.geometric_discord, 0.0, delta=1e-10)
        self.assertAlmostEqual(values.q_measure, 0.0, delta=1e-10)

    def test_two_qubit_bell_state_in_nats(self):
        values = correlation_values(basis_state(SpinQuantumNumber.from_j(1), 0))

        self.assertAlmostEqual(values.discord, math.log(2), delta=1e-7)
        self.assertAlmostEqual(values.geometric_discord, 0.5, delta=1e-12)
        self.assertAlmostEqual(values.q_measure, 1.0, delta=1e-12)

    def test_random_state_satisfies_bound(self):
        state = random_state(SpinQuantumNumber.from_j(6), np.random.default_rng(8))
        values = correlation_values(state)

        self.assertTrue(values.satisfies_bound())
        self.assertGreater(values.discord, 0.0)
        self.assertGreater(values.q_measure, 0.0)

    def test_dimension_normalization(self):
        state = random_state(SpinQuantumNumber.from_j(6), np.random.default_rng(8))
        values = correlation_values(state, QNormalization.DIMENSION)
        self.assertAlmostEqual(values.q_measure, q_measure_collective(state, QNormalization.DIMENSION), delta=1e-15)

    def test_needs_two_qubits(self):
        state = basis_state(SpinQuantumNumber.from_j(0.5), 0.5)
        with self.assertRaises(ValidationError):
            correlation_values(state)


if __name__ == "__main__":
    unittest.main()
