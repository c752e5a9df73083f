"""
Sweeps of the time-averaged correlations along k and along j.
"""

import logging
import math
from typing import Any, Dict

import numpy as np
import pandas as pd

from kicked_top_correlations.base import ExperimentBase, ExperimentResult
from kicked_top_correlations.classical_dynamics import trivial_fixed_point_thresholds
from kicked_top_correlations.errors import KickedTopError
from kicked_top_correlations.quantum_dynamics import (
    SWEEP_COLUMNS,
    SweepRecord,
    linear_relation_fit,
    locate_bifurcation_jump,
    power_law_fit,
    sweep_j,
    sweep_k,
)

logger = logging.getLogger(__name__)

MEAN_COLUMNS = ["D_mean", "DG_mean", "Q_mean"]


def sweep_plot(sweep: SweepRecord) -> pd.DataFrame:
    """Long-format table of the mean correlations along the swept axis."""
    return ExperimentBase._long_format(sweep.to_frame(), "axis_value", MEAN_COLUMNS)


class SweepKExperiment(ExperimentBase):
    """
    Time-averaged D, D^G and Q against kick strength at fixed j.

    The summary records the first k at which the mean discord jumps and the
    classical thresholds of the two trivial fixed points.
    """

    name = "sweep-k"
    reproduces = "Figs. 3, 4"
    columns = tuple(SWEEP_COLUMNS)

    def run(self) -> ExperimentResult:
        config = self.config
        sweep = sweep_k(
            config.j,
            config.p,
            config.theta0,
            config.phi0,
            config.k_grid,
            config.effective_steps,
            workers=config.threads,
            normalization=config.effective_normalization,
        )
        summary: Dict[str, Any] = {}
        if 0 < config.p < math.pi:
            k_minus, k_plus = trivial_fixed_point_thresholds(config.p)
            summary["k_b_classical_minus"] = k_minus
            summary["k_b_classical_plus"] = k_plus

        try:
            jump = locate_bifurcation_jump(sweep)
            summary["k_jump"] = jump
            logger.info("Mean discord jumps at k = %g", jump)
        except KickedTopError as e:
            logger.warning("No discord jump located: %s", e)
            jump = None

        if jump is not None:
            chaotic = np.array(sweep.axis_values) >= jump
            try:
                fit = linear_relation_fit(
                    sweep.means("D")[chaotic], sweep.means("DG")[chaotic]
                )
                summary["DG_vs_D_slope"] = fit.slope
                summary["DG_vs_D_intercept"] = fit.intercept
            except KickedTopError as e:
                logger.debug("Linear relation not fitted: %s", e)

        return ExperimentResult(
            results=self._format_results(sweep.to_frame()),
            plot=sweep_plot(sweep),
            summary=summary,
        )


class ScalingJExperiment(ExperimentBase):
    """Time-averaged correlations against j with power-law fits in j."""

    name = "scaling-j"
    reproduces = "Figs. 6, 8, 9"
    columns = tuple(SWEEP_COLUMNS)

    def run(self) -> ExperimentResult:
        config = self.config
        sweep = sweep_j(
            config.k,
            config.p,
            config.theta0,
            config.phi0,
            config.effective_j_list,
            config.effective_steps,
            workers=config.threads,
            normalization=config.effective_normalization,
        )

        summary: Dict[str, Any] = {}
        try:
            fits = power_law_fit(sweep, j_min=config.fit_j_min)
        except KickedTopError as e:
            logger.warning("Power laws not fitted: %s", e)
            fits = {}
        for measure, fit in fits.items():
            summary[f"mu_{measure}"] = fit.exponent
            summary[f"mu_{measure}_stderr"] = fit.uncertainty
            summary[f"prefactor_{measure}"] = fit.prefactor
            logger.info("%s ~ j^-%.3f (+- %.3f)", measure, fit.exponent, fit.uncertainty)

        return ExperimentResult(
            results=self._format_results(sweep.to_frame()),
            plot=sweep_plot(sweep),
            summary=summary,
        )
