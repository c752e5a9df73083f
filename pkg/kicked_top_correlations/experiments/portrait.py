import logging

from kicked_top_correlations.base import ExperimentBase, ExperimentResult
from kicked_top_correlations.classical_dynamics import (
    ClassicalPoint,
    phase_portrait,
    portrait_frame,
)

logger = logging.getLogger(__name__)


class PortraitExperiment(ExperimentBase):
    """
    Stroboscopic phase portrait of the classical map.

    The laid-out seeds are followed by one extra orbit started at
    (theta0, phi0), the classical image of the initial coherent state.
    """

    name = "portrait"
    reproduces = "Figs. 1, 2, 7"
    columns = ("orbit_id", "step", "theta", "phi")

    def run(self) -> ExperimentResult:
        config = self.config
        start = ClassicalPoint.from_angles(config.theta0, config.phi0)
        orbits = phase_portrait(
            config.k,
            config.p,
            config.n_seeds,
            config.portrait_steps,
            seed_layout=config.seed_layout,
            rng_seed=config.seed,
            extra_seeds=(start,),
        )
        logger.info("Portrait at k=%g, p=%g: %d orbits", config.k, config.p, len(orbits))

        results = self._format_results(portrait_frame(orbits))
        plot = results.rename(columns={"orbit_id": "series", "phi": "x", "theta": "y"})
        plot = plot.loc[:, ["series", "x", "y", "step"]]
        return ExperimentResult(
            results=results,
            plot=plot,
            summary={"n_orbits": len(orbits), "start_orbit_id": len(orbits) - 1},
        )
