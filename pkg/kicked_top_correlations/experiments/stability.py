import logging
import math
from typing import List, Tuple

import numpy as np
import pandas as pd

from kicked_top_correlations.base import ExperimentBase, ExperimentResult
from kicked_top_correlations.classical_dynamics import (
    ClassicalPoint,
    locate_cycle,
    max_multiplier,
    stability_scan,
    trivial_fixed_point_thresholds,
)
from kicked_top_correlations.errors import CalculationError

logger = logging.getLogger(__name__)

# Distance below which a located fixed point counts as one of (0, -1, 0), (0, 1, 0)
TRIVIAL_POINT_DISTANCE = 1e-6


def analytic_threshold(point: ClassicalPoint, period: int, p: float) -> float:
    """Closed-form k_b for the trivial fixed points, NaN for any other orbit."""
    if period != 1 or not 0 < p < math.pi:
        return float("nan")
    k_minus, k_plus = trivial_fixed_point_thresholds(p)
    if point.distance_to(ClassicalPoint(0.0, -1.0, 0.0)) < TRIVIAL_POINT_DISTANCE:
        return k_minus
    if point.distance_to(ClassicalPoint(0.0, 1.0, 0.0)) < TRIVIAL_POINT_DISTANCE:
        return k_plus
    return float("nan")


class StabilityScanExperiment(ExperimentBase):
    """
    Bifurcation kick strength of a periodic orbit of the classical map.

    The orbit is located near (cycle_theta, cycle_phi) at k_min and followed
    in k until its largest multiplier leaves the unit circle.
    """

    name = "stability-scan"
    reproduces = "Bifurcation thresholds of Figs. 3, 4, 7"
    columns = ("period", "theta", "phi", "p", "k_start", "k_end", "dk", "k_b", "k_b_analytic")

    def _multiplier_curve(self, start: ClassicalPoint) -> List[Tuple[float, float]]:
        config = self.config
        curve = []
        point = start
        for k in np.arange(config.k_min, config.k_max + 0.5 * config.dk, config.dk):
            try:
                point = locate_cycle(point, config.period, float(k), config.p)
            except CalculationError as e:
                logger.debug("Continuation stopped at k = %g: %s", k, e)
                break
            curve.append((float(k), max_multiplier(point, config.period, float(k), config.p)))
        return curve

    def run(self) -> ExperimentResult:
        config = self.config
        seed = ClassicalPoint.from_angles(config.cycle_theta, config.cycle_phi)
        start = locate_cycle(seed, config.period, config.k_min, config.p)
        k_b = stability_scan(start, config.period, config.p, (config.k_min, config.k_max), config.dk)
        k_b_analytic = analytic_threshold(start, config.period, config.p)

        results = pd.DataFrame(
            [
                {
                    "period": config.period,
                    "theta": start.theta,
                    "phi": start.phi,
                    "p": config.p,
                    "k_start": config.k_min,
                    "k_end": config.k_max,
                    "dk": config.dk,
                    "k_b": k_b,
                    "k_b_analytic": k_b_analytic,
                }
            ]
        )

        plot = None
        if config.plot:
            curve = self._multiplier_curve(start)
            plot = pd.DataFrame(
                [("max_multiplier", k, modulus) for k, modulus in curve],
                columns=["series", "x", "y"],
            )
        return ExperimentResult(
            results=self._format_results(results),
            plot=plot,
            summary={"k_b": k_b, "k_b_analytic": k_b_analytic},
        )
