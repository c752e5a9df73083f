import unittest

from kicked_top_correlations.config import Experiment, ExperimentConfig
from kicked_top_correlations.experiments.ensembles import (
    CoeCompareExperiment,
    EigenvectorQExperiment,
    Table1Experiment,
)
from kicked_top_correlations.experiments.portrait import PortraitExperiment
from kicked_top_correlations.experiments.stability import StabilityScanExperiment
from kicked_top_correlations.experiments.sweeps import ScalingJExperiment, SweepKExperiment
from kicked_top_correlations.factory import ExperimentFactory


class TestExperimentFactory(unittest.TestCase):

    def test_create_every_experiment(self):
        expected = {
            Experiment.PORTRAIT: PortraitExperiment,
            Experiment.SWEEP_K: SweepKExperiment,
            Experiment.SCALING_J: ScalingJExperiment,
            Experiment.TABLE1: Table1Experiment,
            Experiment.COE_COMPARE: CoeCompareExperiment,
            Experiment.EIGVEC_Q: EigenvectorQExperiment,
            Experiment.STABILITY_SCAN: StabilityScanExperiment,
        }
        for experiment, experiment_class in expected.items():
            created = ExperimentFactory.create(ExperimentConfig(experiment))
            self.assertIsInstance(created, experiment_class)
            self.assertEqual(created.name, experiment.value)

    def test_catalogue(self):
        catalogue = dict(ExperimentFactory.catalogue())

        self.assertEqual(len(catalogue), 7)
        self.assertEqual(catalogue["table1"], "Table 1 & Fig. 5")
        self.assertEqual(catalogue["eigvec-q"], "Fig. 10")
        self.assertEqual(catalogue["portrait"], "Figs. 1, 2, 7")


if __name__ == "__main__":
    unittest.main()
