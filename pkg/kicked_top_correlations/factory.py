"""
Factory for creating experiment instances.
"""

from typing import Dict, List, Tuple, Type

from kicked_top_correlations.base import ExperimentBase
from kicked_top_correlations.config import Experiment, ExperimentConfig
from kicked_top_correlations.errors import ConfigurationError


class ExperimentFactory:
    """
    Factory class for creating experiments from a validated configuration.
    """

    @staticmethod
    def experiment_map() -> Dict[Experiment, Type[ExperimentBase]]:
        """Mapping from experiment to its experiment class."""
        # Import here to avoid circular imports
        from kicked_top_correlations.experiments.ensembles import (
            CoeCompareExperiment,
            EigenvectorQExperiment,
            Table1Experiment,
        )
        from kicked_top_correlations.experiments.portrait import PortraitExperiment
        from kicked_top_correlations.experiments.stability import StabilityScanExperiment
        from kicked_top_correlations.experiments.sweeps import (
            ScalingJExperiment,
            SweepKExperiment,
        )

        return {
            Experiment.PORTRAIT: PortraitExperiment,
            Experiment.SWEEP_K: SweepKExperiment,
            Experiment.SCALING_J: ScalingJExperiment,
            Experiment.TABLE1: Table1Experiment,
            Experiment.COE_COMPARE: CoeCompareExperiment,
            Experiment.EIGVEC_Q: EigenvectorQExperiment,
            Experiment.STABILITY_SCAN: StabilityScanExperiment,
        }

    @staticmethod
    def create(config: ExperimentConfig) -> ExperimentBase:
        """
        Create the experiment selected by a configuration.

        Every field is validated by ExperimentConfig, so only the experiment
        name is checked here.

        Args:
            config: The validated configuration

        Returns:
            An instance of the requested experiment

        Raises:
            ConfigurationError: If the experiment is unknown
        """
        experiment_map = ExperimentFactory.experiment_map()
        if config.experiment not in experiment_map:
            valid_types = ", ".join(experiment.value for experiment in experiment_map)
            raise ConfigurationError(
                f"Invalid experiment: {config.experiment}",
                f"Valid experiments are: {valid_types}",
                field="experiment",
            )
        return experiment_map[config.experiment](config)

    @staticmethod
    def catalogue() -> List[Tuple[str, str]]:
        """(experiment name, published result it reproduces) in a stable order."""
        return [
            (experiment.value, experiment_class.reproduces)
            for experiment, experiment_class in ExperimentFactory.experiment_map().items()
        ]
