import math
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from kicked_top_correlations.constants import PaperDefaults
from kicked_top_correlations.errors import CalculationError, ValidationError
from kicked_top_correlations.quantum_dynamics import (
    SWEEP_COLUMNS,
    CorrelationAverages,
    SweepRecord,
    default_j_grid,
    fit_power_law,
    linear_relation_fit,
    locate_bifurcation_jump,
    power_law_fit,
    sweep_j,
    sweep_k,
    time_averaged_correlations,
    write_sweep_csv,
)

RUN_SLOW = os.environ.get("KICKTOP_RUN_SLOW") == "1"


def synthetic_sweep(axis, values, discord, geometric=None, q=None):
    geometric = geometric if geometric is not None else [0.5 * d for d in discord]
    q = q if q is not None else [0.9] * len(discord)
    averages = tuple(
        CorrelationAverages(d, 0.0, g, 0.0, qq, 0.0, 100) for d, g, qq in zip(discord, geometric, q)
    )
    return SweepRecord(
        axis=axis,
        axis_values=tuple(values),
        averages=averages,
        n_steps=100,
        p=1.7,
        theta0=math.pi / 2,
        phi0=-math.pi / 2,
        j=50.0 if axis == "k" else None,
        k=2.0 if axis == "j" else None,
    )


class TestSweeps(unittest.TestCase):

    def test_sweep_k_is_sorted(self):
        sweep = sweep_k(2, 1.7, math.pi / 2, -math.pi / 2, [3.0, 1.0], 4)
        frame = sweep.to_frame()

        self.assertEqual(sweep.axis_values, (1.0, 3.0))
        self.assertEqual(list(frame.columns), SWEEP_COLUMNS)
        self.assertEqual(frame["k"].tolist(), [1.0, 3.0])
        self.assertEqual(frame["j"].tolist(), [2.0, 2.0])
        self.assertEqual(frame["T"].tolist(), [4, 4])

    def test_sweep_matches_single_run(self):
        sweep = sweep_k(2, 1.7, math.pi / 2, -math.pi / 2, [5.0], 4)
        single = time_averaged_correlations(2, 5.0, 1.7, math.pi / 2, -math.pi / 2, 4)
        self.assertEqual(sweep.averages[0], single)

    def test_parallel_matches_serial(self):
        grid = [1.0, 2.0, 4.0]
        serial = sweep_k(1.5, 1.7, 1.0, 0.5, grid, 3, workers=1)
        parallel = sweep_k(1.5, 1.7, 1.0, 0.5, grid, 3, workers=2)
        self.assertEqual(serial.averages, parallel.averages)

    def test_sweep_j(self):
        sweep = sweep_j(10.0, 1.7, math.pi / 2, -math.pi / 2, [2, 1], 3)
        frame = sweep.to_frame()

        self.assertEqual(sweep.axis_values, (1.0, 2.0))
        self.assertEqual(frame["j"].tolist(), [1.0, 2.0])
        self.assertEqual(frame["k"].tolist(), [10.0, 10.0])

    def test_empty_grids(self):
        with self.assertRaises(ValidationError):
            sweep_k(2, 1.7, 1.0, 0.0, [], 10)
        with self.assertRaises(ValidationError):
            sweep_j(2.0, 1.7, 1.0, 0.0, [], 10)

    def test_write_csv(self):
        sweep = synthetic_sweep("k", [1.0, 2.0], [0.1, 0.2])
        with tempfile.TemporaryDirectory() as directory:
            path = write_sweep_csv(sweep, Path(directory) / "sweep.csv")
            loaded = pd.read_csv(path)
        self.assertEqual(list(loaded.columns), SWEEP_COLUMNS)
        self.assertAlmostEqual(loaded["D_mean"].iloc[1], 0.2, delta=1e-12)


class TestFits(unittest.TestCase):

    def test_exact_power_law(self):
        x = [10.0, 20.0, 40.0, 80.0, 160.0]
        fit = fit_power_law(x, [7.0 * value**-0.5 for value in x])

        self.assertAlmostEqual(fit.exponent, 0.5, delta=1e-12)
        self.assertAlmostEqual(fit.prefactor, 7.0, delta=1e-9)
        self.assertAlmostEqual(fit.uncertainty, 0.0, delta=1e-8)
        self.assertEqual(fit.n_points, 5)

    def test_power_law_needs_data(self):
        with self.assertRaises(ValidationError):
            fit_power_law([1.0, 2.0, 3.0, 4.0], [1.0, 0.5, 0.3, 0.2])
        with self.assertRaises(ValidationError):
            fit_power_law([1.0, 2.0, 3.0, 4.0, 5.0], [1.0, 0.5, 0.0, 0.2, 0.1])

    def test_power_law_fit_of_sweep(self):
        j_values = [5.0, 10.0, 20.0, 40.0, 80.0, 160.0]
        sweep = synthetic_sweep(
            "j",
            j_values,
            [j**-0.38 for j in j_values],
            [j**-0.94 for j in j_values],
            [1 - j**-0.45 for j in j_values],
        )
        fits = power_law_fit(sweep, j_min=10.0)

        self.assertAlmostEqual(fits["D"].exponent, 0.38, delta=1e-10)
        self.assertAlmostEqual(fits["DG"].exponent, 0.94, delta=1e-10)
        self.assertEqual(fits["D"].n_points, 5)

    def test_power_law_fit_needs_j_axis(self):
        with self.assertRaises(ValidationError):
            power_law_fit(synthetic_sweep("k", [1.0, 2.0, 3.0, 4.0, 5.0], [0.1] * 5))

    def test_linear_relation(self):
        discord = [0.1, 0.15, 0.2, 0.25]
        fit = linear_relation_fit(discord, [0.317 * d - 0.018 for d in discord])

        self.assertAlmostEqual(fit.slope, 0.317, delta=1e-12)
        self.assertAlmostEqual(fit.intercept, -0.018, delta=1e-12)
        with self.assertRaises(ValidationError):
            linear_relation_fit([0.1, 0.2], [0.01, 0.02])


class TestBifurcationJump(unittest.TestCase):

    def test_jump_location(self):
        k_values = [float(k) for k in range(1, 11)]
        sweep = synthetic_sweep("k", k_values, [0.01] * 6 + [0.2] * 4)
        self.assertEqual(locate_bifurcation_jump(sweep), 7.0)

    def test_no_jump(self):
        sweep = synthetic_sweep("k", [float(k) for k in range(1, 11)], [0.01] * 10)
        with self.assertRaises(CalculationError):
            locate_bifurcation_jump(sweep)

    def test_short_sweep(self):
        with self.assertRaises(ValidationError):
            locate_bifurcation_jump(synthetic_sweep("k", [1.0, 2.0], [0.01, 0.2]))


class TestDefaultGrid(unittest.TestCase):

    def test_log_spaced_integers(self):
        grid = default_j_grid()

        self.assertEqual(grid[0], 10.0)
        self.assertEqual(grid[-1], 400.0)
        self.assertEqual(grid, sorted(set(grid)))
        self.assertTrue(all(j == int(j) for j in grid))
        self.assertLessEqual(len(grid), 20)


class TestTableRegression(unittest.TestCase):

    def test_floquet_row_is_in_nats(self):
        # 0.29653 is the same run with base-2 entropies
        averages = time_averaged_correlations(50, 10.0, 1.7, math.pi / 2, -math.pi / 2, 1000)

        self.assertAlmostEqual(averages.discord_mean, 0.29653 * math.log(2), delta=1e-3)
        self.assertAlmostEqual(averages.geometric_discord_mean, 0.04532, delta=5e-4)
        self.assertAlmostEqual(averages.q_mean, 0.98629, delta=5e-4)


@unittest.skipUnless(RUN_SLOW, "set KICKTOP_RUN_SLOW=1 to reproduce published values")
class TestPublishedValues(unittest.TestCase):

    def test_table_floquet_row(self):
        averages = time_averaged_correlations(50, 10.0, 1.7, math.pi / 2, -math.pi / 2, 1000)

        self.assertAlmostEqual(averages.discord_mean, 0.205, delta=0.01)
        self.assertAlmostEqual(averages.geometric_discord_mean, 0.045, delta=0.005)
        self.assertAlmostEqual(averages.q_mean, 0.986, delta=0.005)

    def test_table_floquet_row_large_spin(self):
        averages = time_averaged_correlations(120, 10.0, 1.7, math.pi / 2, -math.pi / 2, 1000)

        self.assertAlmostEqual(averages.discord_mean, 0.217, delta=0.01)
        self.assertAlmostEqual(averages.geometric_discord_mean, 0.049, delta=0.005)
        self.assertAlmostEqual(averages.q_mean, 0.994, delta=0.005)

    def test_scaling_exponents(self):
        sweep = sweep_j(2.0, PaperDefaults.P_SYMMETRIC, math.pi / 2, -math.pi / 2, default_j_grid(), 500, workers=4)
        fits = power_law_fit(sweep)

        self.assertAlmostEqual(fits["D"].exponent, 0.38, delta=0.05)
        self.assertAlmostEqual(fits["DG"].exponent, 0.94, delta=0.05)
        self.assertAlmostEqual(fits["Q"].exponent, 0.45, delta=0.05)

    def test_discord_jump_near_classical_threshold(self):
        grid = np.round(np.arange(0.5, 4.01, 0.1), 10)
        sweep = sweep_k(120, PaperDefaults.P_SYMMETRIC, math.pi / 2, -math.pi / 2, grid, 500, workers=4)
        self.assertAlmostEqual(locate_bifurcation_jump(sweep), 2.0, delta=0.2)


if __name__ == "__main__":
    unittest.main()
