import math
import unittest

import numpy as np

from kicked_top_correlations.classical_dynamics import (
    ClassicalPoint,
    locate_cycle,
    max_multiplier,
    monodromy,
    stability_scan,
    trivial_fixed_point_thresholds,
)
from kicked_top_correlations.errors import CalculationError, ValidationError

NEGATIVE_Y = ClassicalPoint(0.0, -1.0, 0.0)
POSITIVE_Y = ClassicalPoint(0.0, 1.0, 0.0)


class TestTrivialThresholds(unittest.TestCase):

    def test_symmetric_precession(self):
        k_minus, k_plus = trivial_fixed_point_thresholds(math.pi / 2)

        self.assertAlmostEqual(k_minus, 2.0, delta=1e-12)
        self.assertAlmostEqual(k_plus, 2.0, delta=1e-12)

    def test_generic_precession(self):
        k_minus, k_plus = trivial_fixed_point_thresholds(1.7)

        self.assertAlmostEqual(k_minus, 1.757, delta=0.001)
        self.assertAlmostEqual(k_plus, 2 * math.tan(0.85), delta=1e-12)

    def test_generic_precession_quoted_value(self):
        _, k_plus = trivial_fixed_point_thresholds(1.7)
        self.assertAlmostEqual(k_plus, 2.2, delta=0.1)

    def test_invalid_precession(self):
        with self.assertRaises(ValidationError):
            trivial_fixed_point_thresholds(0.0)


class TestMonodromy(unittest.TestCase):

    def test_trace_at_trivial_fixed_point(self):
        # trace 2 cos p - k sin p at (0, -1, 0)
        k, p = 1.3, 1.7
        trace = float(np.trace(monodromy(NEGATIVE_Y, 1, k, p)))
        self.assertAlmostEqual(trace, 2 * math.cos(p) - k * math.sin(p), delta=1e-6)

    def test_elliptic_point_has_unit_multipliers(self):
        self.assertAlmostEqual(max_multiplier(POSITIVE_Y, 1, 1.0, 1.7), 1.0, delta=1e-7)

    def test_invalid_period(self):
        with self.assertRaises(ValidationError):
            monodromy(NEGATIVE_Y, 0, 1.0, 1.0)


class TestLocateCycle(unittest.TestCase):

    def test_converges_to_trivial_fixed_point(self):
        seed = ClassicalPoint.from_angles(math.pi / 2 + 0.05, -math.pi / 2 + 0.05)
        point = locate_cycle(seed, 1, 1.0, math.pi / 2)
        self.assertLess(point.distance_to(NEGATIVE_Y), 1e-8)


class TestStabilityScan(unittest.TestCase):

    def test_symmetric_precession(self):
        k_b = stability_scan(NEGATIVE_Y, 1, math.pi / 2, (0.0, 6.0), 0.05)
        self.assertAlmostEqual(k_b, 2.0, delta=0.001)

    def test_generic_precession_negative_y(self):
        k_b = stability_scan(NEGATIVE_Y, 1, 1.7, (0.0, 6.0), 0.05)
        self.assertAlmostEqual(k_b, 1.76, delta=0.01)

    def test_generic_precession_positive_y(self):
        k_b = stability_scan(POSITIVE_Y, 1, 1.7, (0.0, 6.0), 0.05)
        self.assertAlmostEqual(k_b, 2 * math.tan(0.85), delta=0.001)

    def test_secondary_bifurcation(self):
        # period-1 points born from (0, 1, 0) at k = 2
        point = locate_cycle(ClassicalPoint.from_angles(0.89, 2.515), 1, 3.0, math.pi / 2)
        k_b = stability_scan(point, 1, math.pi / 2, (3.0, 5.0), 0.01)
        self.assertAlmostEqual(k_b, math.sqrt(2) * math.pi, delta=0.01)

    def test_no_loss_in_range(self):
        with self.assertRaises(CalculationError):
            stability_scan(NEGATIVE_Y, 1, math.pi / 2, (0.0, 1.5), 0.1)

    def test_invalid_range(self):
        with self.assertRaises(ValidationError):
            stability_scan(NEGATIVE_Y, 1, math.pi / 2, (3.0, 1.0), 0.1)
        with self.assertRaises(ValidationError):
            stability_scan(NEGATIVE_Y, 1, math.pi / 2, (0.0, 1.0), 0.0)


if __name__ == "__main__":
    unittest.main()
