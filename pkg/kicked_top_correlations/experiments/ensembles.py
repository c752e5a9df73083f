"""
Experiments comparing kicked top dynamics with random-matrix predictions.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from kicked_top_correlations.base import ExperimentBase, ExperimentResult
from kicked_top_correlations.experiments.sweeps import sweep_plot
from kicked_top_correlations.quantum_dynamics import (
    MEASURES,
    SWEEP_COLUMNS,
    CorrelationAverages,
    as_spin,
    correlation_time_series,
    sweep_k,
)
from kicked_top_correlations.rmt import (
    ENSEMBLE_COLUMNS,
    EigenvectorSource,
    EnsembleAverages,
    EnsembleSpec,
    analytic_q_average,
    coe_time_average,
    eigenvector_q_statistics,
    ensemble_frame,
)

logger = logging.getLogger(__name__)

FLOQUET = "floquet"

EIGVEC_COLUMNS = ["j", "source", "n_matrices", "n_vectors", "Q_mean", "Q_stderr", "Q_analytic"]
PARITY_COLUMNS = ["Q_plus", "Q_minus"]

# Relative distance of the mean discord to the COE value counted as agreement
AGREEMENT_TOLERANCE = 0.1


def _stderr(std: float, n_steps: int) -> float:
    return std / math.sqrt(n_steps)


class Table1Experiment(ExperimentBase):
    """
    Time averages of the Floquet evolution next to those of the COE model.

    One row per (j, evolution): the Floquet row uses the kicked top at (k, p),
    the random-matrix row samples n_samples unitaries from the configured
    ensemble. Both start from the coherent state at (theta0, phi0).
    """

    name = "table1"
    reproduces = "Table 1 & Fig. 5"
    columns = tuple(ENSEMBLE_COLUMNS)

    def run(self) -> ExperimentResult:
        config = self.config
        normalization = config.effective_normalization
        n_steps = config.effective_steps
        rows: List[List[Any]] = []
        traces = []

        for j in config.effective_j_list:
            spin = as_spin(j)
            series = correlation_time_series(
                spin, config.k, config.p, config.theta0, config.phi0, n_steps, normalization
            )
            averages = CorrelationAverages.from_series(series)
            rows.append(
                [
                    spin.j,
                    FLOQUET,
                    1,
                    config.seed,
                    averages.discord_mean,
                    averages.geometric_discord_mean,
                    averages.q_mean,
                    analytic_q_average(spin, normalization),
                    _stderr(averages.discord_std, n_steps),
                    _stderr(averages.geometric_discord_std, n_steps),
                    _stderr(averages.q_std, n_steps),
                ]
            )
            trace = series.to_frame()
            trace["j"] = spin.j
            traces.append(trace)

            spec = EnsembleSpec(spin, config.effective_n_samples, config.seed, config.effective_ensemble)
            random_matrix = coe_time_average(
                spec, config.theta0, config.phi0, n_steps, normalization, workers=config.threads
            )
            rows.append(ensemble_frame([random_matrix]).iloc[0].tolist())
            logger.info(
                "j=%s: floquet D=%.4f, %s D=%.4f",
                spin,
                averages.discord_mean,
                spec.ensemble.value,
                random_matrix.averages.discord_mean,
            )

        results = pd.DataFrame(rows, columns=ENSEMBLE_COLUMNS)
        plot = self._long_format(pd.concat(traces, ignore_index=True), "t", list(MEASURES), ["j"])
        return ExperimentResult(results=self._format_results(results), plot=plot)


class CoeCompareExperiment(ExperimentBase):
    """
    Sweep along k against the random-matrix reference at the same j.

    The results keep the sweep schema; the reference values go to the
    summary and appear as constant series in the plot table.
    """

    name = "coe-compare"
    reproduces = "Figs. 3, 4 with COE reference"
    columns = tuple(SWEEP_COLUMNS)

    def run(self) -> ExperimentResult:
        config = self.config
        normalization = config.effective_normalization
        n_steps = config.effective_steps
        sweep = sweep_k(
            config.j,
            config.p,
            config.theta0,
            config.phi0,
            config.k_grid,
            n_steps,
            workers=config.threads,
            normalization=normalization,
        )
        spec = EnsembleSpec(
            as_spin(config.j), config.effective_n_samples, config.seed, config.effective_ensemble
        )
        reference = coe_time_average(
            spec, config.theta0, config.phi0, n_steps, normalization, workers=config.threads
        )

        summary: Dict[str, Any] = {
            "reference_ensemble": spec.ensemble.value,
            "D_reference": reference.averages.discord_mean,
            "DG_reference": reference.averages.geometric_discord_mean,
            "Q_reference": reference.averages.q_mean,
            "stderr_D_reference": reference.stderr_discord,
            "stderr_DG_reference": reference.stderr_geometric_discord,
            "stderr_Q_reference": reference.stderr_q,
        }
        onset = agreement_onset(sweep.axis_values, sweep.means("D"), reference)
        if onset is not None:
            summary["k_agreement_onset"] = onset
            logger.info("Mean discord agrees with %s from k = %g", spec.ensemble.value, onset)

        plot = sweep_plot(sweep)
        lines = pd.DataFrame(
            [
                (f"{measure}_reference", k, value)
                for measure, value in zip(MEASURES, reference.averages.means)
                for k in sweep.axis_values
            ],
            columns=["series", "x", "y"],
        )
        return ExperimentResult(
            results=self._format_results(sweep.to_frame()),
            plot=pd.concat([plot, lines], ignore_index=True),
            summary=summary,
        )


def agreement_onset(
    k_values: Sequence[float], discord_means: Sequence[float], reference: EnsembleAverages
) -> Optional[float]:
    """
    Smallest k from which every mean discord stays within AGREEMENT_TOLERANCE
    (relative) of the random-matrix value, or None.
    """
    target = reference.averages.discord_mean
    close = np.abs(np.asarray(discord_means) - target) <= AGREEMENT_TOLERANCE * abs(target)
    onset = None
    for k, agrees in zip(reversed(list(k_values)), reversed(close.tolist())):
        if not agrees:
            break
        onset = float(k)
    return onset


class EigenvectorQExperiment(ExperimentBase):
    """Mean Q of eigenvectors against the exact random-vector average."""

    name = "eigvec-q"
    reproduces = "Fig. 10"
    columns = tuple(EIGVEC_COLUMNS)

    def _sources(self) -> List[EigenvectorSource]:
        if self.config.source is not None:
            return [self.config.source]
        return [EigenvectorSource.COE_SAMPLES, EigenvectorSource.FLOQUET_K_RANGE]

    def run(self) -> ExperimentResult:
        config = self.config
        normalization = config.effective_normalization
        rows = []
        for j in config.effective_j_list:
            analytic = analytic_q_average(j, normalization)
            for source in self._sources():
                statistics = eigenvector_q_statistics(
                    source,
                    j,
                    n_samples=config.effective_n_samples,
                    seed=config.seed,
                    p=config.p,
                    ensemble=config.effective_ensemble,
                    normalization=normalization,
                    parity_resolved=config.parity_resolved,
                )
                sectors = statistics.sector_means or {}
                rows.append(
                    {
                        "j": float(j),
                        "source": source.value,
                        "n_matrices": statistics.n_matrices,
                        "n_vectors": statistics.n_vectors,
                        "Q_mean": statistics.mean,
                        "Q_stderr": statistics.stderr,
                        "Q_analytic": analytic,
                        "Q_plus": sectors.get("+", float("nan")),
                        "Q_minus": sectors.get("-", float("nan")),
                    }
                )
                logger.info(
                    "j=%g %s: Q=%.4f +- %.4f (exact %.4f)",
                    j,
                    source.value,
                    statistics.mean,
                    statistics.stderr,
                    analytic,
                )

        columns = EIGVEC_COLUMNS + (PARITY_COLUMNS if config.parity_resolved else [])
        results = self._format_results(pd.DataFrame(rows), columns)
        plot = results.rename(columns={"source": "series", "j": "x", "Q_mean": "y"})
        plot = plot.loc[:, ["series", "x", "y", "Q_stderr"]]
        exact = pd.DataFrame(
            {
                "series": "analytic",
                "x": results["j"].unique(),
                "y": [analytic_q_average(j, normalization) for j in results["j"].unique()],
                "Q_stderr": 0.0,
            }
        )
        return ExperimentResult(
            results=results, plot=pd.concat([plot, exact], ignore_index=True)
        )
