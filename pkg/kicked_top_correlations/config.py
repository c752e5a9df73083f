"""
Experiment configuration: defaults, INI files, environment variables and overrides.

Sources are applied lowest precedence first: dataclass defaults, the config
file (any sections, ``key = value``), ``KICKTOP_<KEY>`` environment variables,
``--set key=value`` overrides and finally explicit command-line flags.
"""

import configparser
import math
import numbers
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from kicked_top_correlations.classical_dynamics import SeedLayout
from kicked_top_correlations.constants import PaperDefaults
from kicked_top_correlations.correlations import QNormalization
from kicked_top_correlations.errors import ConfigurationError, ValidationError
from kicked_top_correlations.quantum_dynamics import default_j_grid
from kicked_top_correlations.rmt import EigenvectorSource, Ensemble
from kicked_top_correlations.spin_algebra import SpinQuantumNumber
from kicked_top_correlations.utils import ExactMathHelper

ENV_PREFIX = "KICKTOP_"


class Experiment(str, Enum):
    PORTRAIT = "portrait"
    SWEEP_K = "sweep-k"
    SCALING_J = "scaling-j"
    TABLE1 = "table1"
    COE_COMPARE = "coe-compare"
    EIGVEC_Q = "eigvec-q"
    STABILITY_SCAN = "stability-scan"


DEFAULT_K_GRID: Tuple[float, ...] = tuple(round(0.5 + 0.1 * i, 10) for i in range(56))
TABLE_J_VALUES: Tuple[float, ...] = (50.0, 120.0)
EIGVEC_J_VALUES: Tuple[float, ...] = (1.0, 5.0, 10.0, 25.0)

CORRELATION_EXPERIMENTS = {
    Experiment.SWEEP_K,
    Experiment.SCALING_J,
    Experiment.TABLE1,
    Experiment.COE_COMPARE,
}

REAL_FIELDS: Tuple[str, ...] = (
    "j", "k", "p", "theta0", "phi0", "fit_j_min", "cycle_theta", "cycle_phi", "k_min", "k_max", "dk",
)
INTEGER_FIELDS: Tuple[str, ...] = (
    "steps", "n_samples", "n_seeds", "portrait_steps", "period", "seed", "threads",
)

SECTIONS: Dict[str, Tuple[str, ...]] = {
    "experiment": ("experiment",),
    "physics": ("j", "j_list", "k", "k_grid", "p", "theta0", "phi0", "steps", "normalization"),
    "ensemble": ("n_samples", "ensemble", "source", "parity_resolved", "fit_j_min"),
    "classical": (
        "n_seeds",
        "portrait_steps",
        "seed_layout",
        "period",
        "cycle_theta",
        "cycle_phi",
        "k_min",
        "k_max",
        "dk",
    ),
    "run": ("seed", "threads", "out", "plot"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Complete, validated parameter set of one experiment run.

    Fields left as None take the experiment's own default (see the
    ``effective_*`` properties).
    """

    experiment: Experiment
    j: float = 50.0
    j_list: Optional[Tuple[float, ...]] = None
    k: float = PaperDefaults.CHAOTIC_K
    k_grid: Tuple[float, ...] = DEFAULT_K_GRID
    p: float = PaperDefaults.P_GENERIC
    theta0: float = PaperDefaults.THETA0
    phi0: float = PaperDefaults.PHI0
    steps: Optional[int] = None
    normalization: Optional[QNormalization] = None
    n_samples: Optional[int] = None
    ensemble: Optional[Ensemble] = None
    source: Optional[EigenvectorSource] = None
    parity_resolved: bool = False
    fit_j_min: float = 0.0
    n_seeds: int = 60
    portrait_steps: int = 300
    seed_layout: SeedLayout = SeedLayout.GRID
    period: int = 1
    cycle_theta: float = PaperDefaults.THETA0
    cycle_phi: float = PaperDefaults.PHI0
    k_min: float = 0.0
    k_max: float = 6.0
    dk: float = 0.01
    seed: int = 0
    threads: int = 1
    out: Path = Path("kicktop-output")
    plot: bool = True

    def __post_init__(self) -> None:
        """
        Validate every field before any computation happens.

        Raises:
            ConfigurationError: Naming the first offending field
        """
        for name in _PARSERS:
            value = getattr(self, name)
            if isinstance(value, str) and not isinstance(value, Enum):
                object.__setattr__(self, name, parse_value(name, value))
        for name in ("j_list", "k_grid"):
            value = getattr(self, name)
            if value is not None or name not in _OPTIONAL_FIELDS:
                object.__setattr__(self, name, _real_tuple(name, value))
        for name in REAL_FIELDS:
            object.__setattr__(self, name, _real_value(name, getattr(self, name)))
        for name in INTEGER_FIELDS:
            value = getattr(self, name)
            if value is not None or name not in _OPTIONAL_FIELDS:
                object.__setattr__(self, name, _integer_value(name, value))
        object.__setattr__(self, "out", Path(self.out))

        self._check_spin("j", self.j)
        for value in self.j_list or ():
            self._check_spin("j_list", value)
        if self.j_list is not None and len(self.j_list) == 0:
            raise ConfigurationError("j_list must not be empty", field="j_list")
        if self.experiment in (Experiment.SWEEP_K, Experiment.COE_COMPARE) and not self.k_grid:
            raise ConfigurationError("k_grid must not be empty", field="k_grid")
        if not 0.0 <= self.theta0 <= math.pi:
            raise ConfigurationError("theta0 must lie in [0, pi]", f"{self.theta0}", field="theta0")
        if not -math.pi <= self.phi0 <= math.pi:
            raise ConfigurationError("phi0 must lie in [-pi, pi]", f"{self.phi0}", field="phi0")

        for name, minimum in (
            ("steps", 1),
            ("n_samples", 1),
            ("n_seeds", 1),
            ("portrait_steps", 0),
            ("period", 1),
            ("threads", 1),
        ):
            value = getattr(self, name)
            if value is not None and value < minimum:
                raise ConfigurationError(f"{name} must be at least {minimum}", f"{value}", field=name)
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer", f"{self.seed}", field="seed")
        if self.experiment is Experiment.STABILITY_SCAN:
            if not self.k_min < self.k_max:
                raise ConfigurationError("k_min must be below k_max", field="k_max")
            if self.dk <= 0:
                raise ConfigurationError("dk must be positive", field="dk")
        if self.experiment is Experiment.COE_COMPARE and self.ensemble is Ensemble.HAAR_SPHERE_REAL:
            raise ConfigurationError(
                "coe-compare needs an ensemble of unitaries", field="ensemble"
            )

    def _check_spin(self, name: str, value: float) -> None:
        try:
            spin = SpinQuantumNumber.from_j(value)
        except ValidationError as e:
            raise ConfigurationError(str(e), field=name)
        if self.experiment in CORRELATION_EXPERIMENTS and spin.n_qubits < 2:
            raise ConfigurationError(
                "Correlations need at least two qubits (j >= 1)", f"j = {value}", field=name
            )

    @property
    def effective_steps(self) -> int:
        if self.steps is not None:
            return self.steps
        if self.experiment is Experiment.SCALING_J:
            return PaperDefaults.SCALING_STEPS
        return PaperDefaults.TABLE_STEPS

    @property
    def effective_j_list(self) -> Tuple[float, ...]:
        if self.j_list is not None:
            return self.j_list
        if self.experiment is Experiment.TABLE1:
            return TABLE_J_VALUES
        if self.experiment is Experiment.EIGVEC_Q:
            return EIGVEC_J_VALUES
        return tuple(default_j_grid())

    @property
    def effective_n_samples(self) -> int:
        if self.n_samples is not None:
            return self.n_samples
        return 100 if self.experiment is Experiment.EIGVEC_Q else 1

    @property
    def effective_ensemble(self) -> Ensemble:
        if self.ensemble is not None:
            return self.ensemble
        return Ensemble.FULL_COE if self.experiment is Experiment.EIGVEC_Q else Ensemble.BLOCK_COE

    @property
    def effective_normalization(self) -> QNormalization:
        if self.normalization is not None:
            return self.normalization
        if self.experiment is Experiment.EIGVEC_Q:
            return QNormalization.DIMENSION
        return QNormalization.QUBIT

    @classmethod
    def from_strings(cls, raw: Mapping[str, str]) -> "ExperimentConfig":
        """
        Build a config from textual values keyed by field name.

        Raises:
            ConfigurationError: For unknown keys, unparsable values or a missing experiment
        """
        values = {}
        for name, text in raw.items():
            key = name.strip().lower().replace("-", "_")
            if key not in _PARSERS:
                raise ConfigurationError(f"Unknown configuration key: {name}", field=name)
            values[key] = parse_value(key, text)
        if values.get("experiment") is None:
            raise ConfigurationError("No experiment selected", field="experiment")
        return cls(**values)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        return cls.from_strings(read_config_file(path))

    def to_config_parser(self) -> configparser.ConfigParser:
        """Serialise every set field into sections; reading it back gives an equal config."""
        parser = configparser.ConfigParser(interpolation=None)
        for section, names in SECTIONS.items():
            parser.add_section(section)
            for name in names:
                value = getattr(self, name)
                if value is not None:
                    parser.set(section, name, format_value(value))
        return parser

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with path.open("w", encoding="utf-8") as handle:
            self.to_config_parser().write(handle)
        return path


def _real_value(name: str, value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(f"{name} must be a real number", f"Provided value: {value!r}", field=name)
    if not math.isfinite(value):
        raise ConfigurationError(f"{name} must be finite", field=name)
    return float(value)


def _real_tuple(name: str, value: object) -> Tuple[float, ...]:
    if isinstance(value, numbers.Number):
        raise ConfigurationError(f"{name} must be a list of real numbers", f"Provided value: {value!r}", field=name)
    try:
        items = tuple(value)
    except TypeError:
        raise ConfigurationError(f"{name} must be a list of real numbers", f"Provided value: {value!r}", field=name)
    return tuple(_real_value(name, item) for item in items)


def _integer_value(name: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigurationError(f"{name} must be an integer", f"Provided value: {value!r}", field=name)
    return int(value)


def _parse_float(text: str) -> float:
    return ExactMathHelper.parse_real(text)


def _parse_int(text: str) -> int:
    stripped = text.strip()
    try:
        return int(stripped)
    except ValueError:
        value = ExactMathHelper.parse_real(stripped)
        if not value.is_integer():
            raise ValidationError("Not an integer", f"Provided value: {text!r}")
        return int(value)


def _parse_float_list(text: str) -> Tuple[float, ...]:
    """Comma-separated values, or an inclusive range written start:stop:step."""
    stripped = text.strip()
    if not stripped:
        return ()
    if ":" in stripped:
        parts = [_parse_float(part) for part in stripped.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValidationError("Ranges are written start:stop:step", f"Provided value: {text!r}")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(value) for value in np.round(start + step * np.arange(count), 12))
    return tuple(_parse_float(part) for part in stripped.split(",") if part.strip())


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValidationError("Not a boolean", f"Provided value: {text!r}")


def _enum_parser(enum_type: type) -> Callable[[str], Enum]:
    def parse(text: str) -> Enum:
        try:
            return enum_type(text.strip())
        except ValueError:
            valid = ", ".join(member.value for member in enum_type)
            raise ValidationError(f"Invalid value {text.strip()!r}", f"Valid values are: {valid}")

    return parse


_PARSERS: Dict[str, Callable[[str], object]] = {
    "experiment": _enum_parser(Experiment),
    "j": _parse_float,
    "j_list": _parse_float_list,
    "k": _parse_float,
    "k_grid": _parse_float_list,
    "p": _parse_float,
    "theta0": _parse_float,
    "phi0": _parse_float,
    "steps": _parse_int,
    "normalization": _enum_parser(QNormalization),
    "n_samples": _parse_int,
    "ensemble": _enum_parser(Ensemble),
    "source": _enum_parser(EigenvectorSource),
    "parity_resolved": _parse_bool,
    "fit_j_min": _parse_float,
    "n_seeds": _parse_int,
    "portrait_steps": _parse_int,
    "seed_layout": _enum_parser(SeedLayout),
    "period": _parse_int,
    "cycle_theta": _parse_float,
    "cycle_phi": _parse_float,
    "k_min": _parse_float,
    "k_max": _parse_float,
    "dk": _parse_float,
    "seed": _parse_int,
    "threads": _parse_int,
    "out": lambda text: Path(text.strip()),
    "plot": _parse_bool,
}

_OPTIONAL_FIELDS = {
    item.name for item in fields(ExperimentConfig) if item.default is None
}


def parse_value(name: str, text: str) -> object:
    """
    Parse the textual value of one field.

    Raises:
        ConfigurationError: Naming the field when the text cannot be parsed
    """
    if name in _OPTIONAL_FIELDS and text.strip().lower() in ("", "none"):
        return None
    try:
        return _PARSERS[name](text)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid value for {name}: {e}", field=name)


def format_value(value: object) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(format_value(item) for item in value)
    return str(value)


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read an INI-style file and flatten all sections into one mapping.

    Raises:
        ConfigurationError: If the file is missing, malformed or repeats a key
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError("Config file not found", str(path), field="config")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigurationError("Malformed config file", f"{path}: {e}", field="config")

    flat: Dict[str, str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            if key in flat:
                raise ConfigurationError(f"Key {key} appears in several sections", field=key)
            flat[key] = value
    return flat


def environment_values(environ: Mapping[str, str]) -> Dict[str, str]:
    """Collect KICKTOP_<FIELD> variables for known fields."""
    return {
        name: environ[ENV_PREFIX + name.upper()]
        for name in _PARSERS
        if ENV_PREFIX + name.upper() in environ
    }


def parse_overrides(overrides: Iterable[str]) -> Dict[str, str]:
    """
    Parse ``key=value`` overrides.

    Raises:
        ConfigurationError: If an override has no '='
    """
    parsed = {}
    for item in overrides:
        key, separator, value = item.partition("=")
        if not separator or not key.strip():
            raise ConfigurationError("Overrides are written key=value", f"Got {item!r}", field=item)
        parsed[key.strip().lower().replace("-", "_")] = value
    return parsed


def load_config(
    experiment: Optional[str],
    config_file: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
    environ: Optional[Mapping[str, str]] = None,
    flags: Optional[Mapping[str, object]] = None,
) -> ExperimentConfig:
    """
    Merge every configuration source into a validated ExperimentConfig.

    Args:
        experiment: Experiment name from the command line (highest precedence)
        config_file: Optional INI file
        overrides: ``key=value`` strings
        environ: Environment mapping (``os.environ`` in the CLI)
        flags: Explicit flag values (seed, threads, out, plot); None entries are ignored

    Returns:
        The validated configuration
    """
    raw: Dict[str, str] = {}
    if config_file is not None:
        raw.update(read_config_file(config_file))
    raw.update(environment_values(environ or {}))
    raw.update(parse_overrides(overrides))
    for name, value in (flags or {}).items():
        if value is not None:
            raw[name] = format_value(value)
    if experiment is not None:
        raw["experiment"] = experiment
    return ExperimentConfig.from_strings(raw)
