from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional, Sequence

import pandas as pd

from kicked_top_correlations.config import ExperimentConfig
from kicked_top_correlations.errors import CalculationError, ConfigurationError, KickedTopError


@dataclass
class ExperimentResult:
    """
    Output of one experiment run.

    Attributes:
        results: Table written to the results CSV
        plot: Optional long-format table (series, x, y, ...) for plotting
        summary: Scalar findings recorded in the manifest
    """

    results: pd.DataFrame
    plot: Optional[pd.DataFrame] = None
    summary: Dict[str, Any] = field(default_factory=dict)


class ExperimentBase(ABC):
    """
    Base abstract class for all experiments.

    Each experiment implements run(), which performs the computation described
    by its configuration and returns the result tables.
    """

    name: ClassVar[str]
    reproduces: ClassVar[str]
    columns: ClassVar[Sequence[str]]

    def __init__(self, config: ExperimentConfig):
        self.config = config

    @abstractmethod
    def run(self) -> ExperimentResult:
        """
        Perform the experiment.

        Returns:
            The result tables and summary

        Raises:
            KickedTopError: If the computation cannot be performed
        """
        pass

    def _format_results(
        self, frame: pd.DataFrame, columns: Optional[Sequence[str]] = None
    ) -> pd.DataFrame:
        """
        Order the columns by the experiment's schema.

        Args:
            frame: Raw results table
            columns: Schema to apply instead of the class default

        Returns:
            The table restricted to, and ordered by, the schema

        Raises:
            CalculationError: If a schema column is missing
        """
        columns = list(self.columns if columns is None else columns)
        missing = [column for column in columns if column not in frame.columns]
        if missing:
            raise CalculationError(
                f"Results of {self.name} lack columns", f"Missing: {', '.join(missing)}"
            )
        return frame.loc[:, columns].reset_index(drop=True)

    @staticmethod
    def _long_format(
        frame: pd.DataFrame, x: str, series: List[str], extra: Sequence[str] = ()
    ) -> pd.DataFrame:
        """Melt wide columns into rows of (series, x, y, *extra)."""
        long = frame.melt(
            id_vars=[x, *extra], value_vars=series, var_name="series", value_name="y"
        ).rename(columns={x: "x"})
        return long.loc[:, ["series", "x", "y", *extra]]

    def execute(self) -> ExperimentResult:
        """
        Run the experiment, attaching its name and seed to numerical failures.

        Raises:
            ConfigurationError: Passed through unchanged
            CalculationError: Wrapping any other failure of run()
        """
        try:
            return self.run()
        except ConfigurationError:
            raise
        except KickedTopError as e:
            raise CalculationError(f"{self.name} failed: {e}", f"seed = {self.config.seed}") from e
