"""
Command-line entry point ``kicktop``.

Exit codes: 0 on success, 2 for an invalid configuration, 3 for a numerical
failure while the experiment runs.
"""

import argparse
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Mapping, Optional, Sequence

from kicked_top_correlations.base import ExperimentBase, ExperimentResult
from kicked_top_correlations.config import (
    Experiment,
    ExperimentConfig,
    format_value,
    load_config,
)
from kicked_top_correlations.constants import OutputConstants, PackageConstants
from kicked_top_correlations.errors import ConfigurationError, KickedTopError, ValidationError
from kicked_top_correlations.factory import ExperimentFactory

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

LOG_LEVEL_VARIABLE = "KICKTOP_LOG_LEVEL"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def list_experiments() -> List[str]:
    """One line per experiment: 'name → published figure or table'."""
    return [f"{name} → {reproduces}" for name, reproduces in ExperimentFactory.catalogue()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kicktop",
        description="Quantum correlations in the kicked top: reproduce published experiments.",
    )
    parser.add_argument(
        "experiment",
        choices=[experiment.value for experiment in Experiment] + ["list"],
        help="experiment to run, or 'list' to show the catalogue",
    )
    parser.add_argument("--config", type=Path, help="INI file with key = value entries")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration value (repeatable)",
    )
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--seed", type=int, help="seed of all random streams")
    parser.add_argument("--threads", type=int, help="worker processes")
    parser.add_argument("--plot", dest="plot", action="store_true", default=None,
                        help="write the plot-ready file (default)")
    parser.add_argument("--no-plot", dest="plot", action="store_false",
                        help="skip the plot-ready file")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for info, -vv for debug logging")
    return parser


def configure_logging(verbosity: int, environ: Mapping[str, str]) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, environ.get(LOG_LEVEL_VARIABLE, "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def write_manifest(
    config: ExperimentConfig, experiment: ExperimentBase, result: ExperimentResult, path: Path
) -> Path:
    """Write the config sections plus run metadata and the result summary."""
    parser = config.to_config_parser()
    parser.add_section("manifest")
    parser.set("manifest", "package", PackageConstants.NAME)
    parser.set("manifest", "version", PackageConstants.VERSION)
    parser.set("manifest", "seed", str(config.seed))
    parser.set("manifest", "reproduces", experiment.reproduces)
    parser.set("manifest", "timestamp", datetime.now(timezone.utc).isoformat())
    parser.add_section("summary")
    for key, value in result.summary.items():
        parser.set("summary", key, format_value(value))
    with path.open("w", encoding="utf-8") as handle:
        parser.write(handle)
    return path


def run(config: ExperimentConfig) -> ExperimentResult:
    """
    Run an experiment and write its artifacts into config.out.

    Writes results.csv, manifest.ini and, when config.plot is set and the
    experiment provides one, plot.csv.

    Raises:
        ConfigurationError: If the experiment cannot be created
        CalculationError: If the computation fails, with the experiment name attached
    """
    experiment = ExperimentFactory.create(config)
    logger.info("Running %s (reproduces %s)", experiment.name, experiment.reproduces)
    result = experiment.execute()

    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    result.results.to_csv(
        out / OutputConstants.RESULTS_FILE, index=False, float_format=OutputConstants.FLOAT_FORMAT
    )
    if config.plot and result.plot is not None:
        result.plot.to_csv(
            out / OutputConstants.PLOT_FILE, index=False, float_format=OutputConstants.FLOAT_FORMAT
        )
    write_manifest(config, experiment, result, out / OutputConstants.MANIFEST_FILE)
    logger.info("Wrote %s results to %s", experiment.name, out)
    return result


def main(argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None) -> int:
    """Parse arguments, run the experiment and return the exit code."""
    environ = os.environ if environ is None else environ
    arguments = build_parser().parse_args(argv)
    configure_logging(arguments.verbose, environ)

    if arguments.experiment == "list":
        for line in list_experiments():
            print(line)
        return EXIT_OK

    try:
        config = load_config(
            arguments.experiment,
            config_file=arguments.config,
            overrides=arguments.overrides,
            environ=environ,
            flags={
                "seed": arguments.seed,
                "threads": arguments.threads,
                "out": arguments.out,
                "plot": arguments.plot,
            },
        )
    except (ConfigurationError, ValidationError) as e:
        field = getattr(e, "field", None)
        prefix = f"invalid configuration ({field})" if field else "invalid configuration"
        print(f"kicktop: {prefix}: {e}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        run(config)
    except ConfigurationError as e:
        print(f"kicktop: invalid configuration ({e.field}): {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KickedTopError as e:
        print(f"kicktop: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"kicktop: cannot write results: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
