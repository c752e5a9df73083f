"""
Floquet evolution of the kicked top and time-averaged correlation sweeps.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import linregress

from kicked_top_correlations.constants import (
    OutputConstants,
    PaperDefaults,
    ToleranceConstants,
)
from kicked_top_correlations.correlations import QNormalization, correlation_values
from kicked_top_correlations.errors import CalculationError, ValidationError
from kicked_top_correlations.spin_algebra import (
    OperatorSet,
    SpinQuantumNumber,
    SymmetricState,
    build_operators,
    coherent_state,
    collective_expectations,
    static_operators,
)
from kicked_top_correlations.utils import LinearAlgebraHelper

logger = logging.getLogger(__name__)

SpinLike = Union[SpinQuantumNumber, float, int]

MEASURES = ("D", "DG", "Q")

SWEEP_COLUMNS = [
    "axis_value",
    "D_mean",
    "D_std",
    "DG_mean",
    "DG_std",
    "Q_mean",
    "Q_std",
    "T",
    "j",
    "k",
    "p",
    "theta0",
    "phi0",
]


def as_spin(spin: SpinLike) -> SpinQuantumNumber:
    """Accept either a SpinQuantumNumber or a numeric j."""
    if isinstance(spin, SpinQuantumNumber):
        return spin
    return SpinQuantumNumber.from_j(spin)


class Propagator(Protocol):
    """One-period evolution acting on amplitude vectors."""

    @property
    def spin(self) -> SpinQuantumNumber: ...

    @property
    def matrix(self) -> np.ndarray: ...

    def apply(self, amplitudes: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class FloquetOperator:
    """
    U = exp(-i (k/2j) J_z^2) exp(-i p J_y), kept in factored form.

    Attributes:
        operators: The operator set holding both factors
    """

    operators: OperatorSet

    @property
    def spin(self) -> SpinQuantumNumber:
        return self.operators.spin

    @property
    def k(self) -> float:
        return self.operators.k

    @property
    def p(self) -> float:
        return self.operators.p

    @property
    def torsion_diagonal(self) -> np.ndarray:
        return self.operators.torsion_diagonal

    @property
    def rotation(self) -> np.ndarray:
        return self.operators.rotation

    @property
    def matrix(self) -> np.ndarray:
        """The assembled d x d unitary (torsion times rotation)."""
        return self.torsion_diagonal[:, None] * self.rotation

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        # the dense rotation acts first, then the diagonal torsion
        return self.torsion_diagonal * (self.rotation @ amplitudes)


@dataclass(frozen=True, eq=False)
class DensePropagator:
    """
    An arbitrary unitary given as a dense matrix (e.g. a random-matrix sample).

    Attributes:
        spin: The spin whose basis the matrix is written in
        matrix: The unitary
    """

    spin: SpinQuantumNumber
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (self.spin.dimension, self.spin.dimension):
            raise ValidationError(
                "Propagator dimension does not match the spin",
                f"Matrix {matrix.shape}, dimension {self.spin.dimension}",
            )
        residual = LinearAlgebraHelper.unitarity_residual(matrix)
        if residual > ToleranceConstants.UNITARITY:
            raise ValidationError("Propagator must be unitary", f"Residual: {residual:.3e}")
        object.__setattr__(self, "matrix", LinearAlgebraHelper.read_only(matrix))

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.matrix @ amplitudes


@dataclass(frozen=True, eq=False)
class CorrelationTimeSeries:
    """
    D, D^G and Q after each kick.

    Attributes:
        spin, k, p, theta0, phi0: Parameters of the run (k and p are None for
            random-matrix evolution)
        normalization: Q normalization used
        steps: Time indices 1..n
        discord, geometric_discord, q_measure: One value per step
    """

    spin: SpinQuantumNumber
    k: Optional[float]
    p: Optional[float]
    theta0: float
    phi0: float
    normalization: QNormalization
    steps: np.ndarray
    discord: np.ndarray
    geometric_discord: np.ndarray
    q_measure: np.ndarray

    def __post_init__(self) -> None:
        n_steps = len(self.steps)
        if not np.array_equal(self.steps, np.arange(1, n_steps + 1)):
            raise ValidationError("Time indices must run contiguously from 1")
        for name in ("discord", "geometric_discord", "q_measure"):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != (n_steps,):
                raise ValidationError(f"{name} must have one value per step")
            if not np.all(np.isfinite(values)):
                raise ValidationError(f"{name} contains non-finite values")
            object.__setattr__(self, name, LinearAlgebraHelper.read_only(values))

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t": self.steps,
                "D": self.discord,
                "DG": self.geometric_discord,
                "Q": self.q_measure,
            }
        )


@dataclass(frozen=True)
class CorrelationAverages:
    """Means and standard deviations of the three measures over steps 1..T."""

    discord_mean: float
    discord_std: float
    geometric_discord_mean: float
    geometric_discord_std: float
    q_mean: float
    q_std: float
    n_steps: int

    @classmethod
    def from_series(cls, series: CorrelationTimeSeries) -> "CorrelationAverages":
        return cls(
            discord_mean=float(np.mean(series.discord)),
            discord_std=float(np.std(series.discord)),
            geometric_discord_mean=float(np.mean(series.geometric_discord)),
            geometric_discord_std=float(np.std(series.geometric_discord)),
            q_mean=float(np.mean(series.q_measure)),
            q_std=float(np.std(series.q_measure)),
            n_steps=series.n_steps,
        )

    @property
    def means(self) -> Tuple[float, float, float]:
        return self.discord_mean, self.geometric_discord_mean, self.q_mean

    def mean_of(self, measure: str) -> float:
        return dict(zip(MEASURES, self.means))[measure]


@dataclass(frozen=True)
class SweepRecord:
    """
    Time averages along a k or j axis.

    Attributes:
        axis: 'k' or 'j'
        axis_values: Swept values in ascending order
        averages: One CorrelationAverages per axis value
        n_steps: Averaging window T
        j, k: The fixed parameter (None for the swept one)
        p, theta0, phi0: Remaining run parameters
    """

    axis: str
    axis_values: Tuple[float, ...]
    averages: Tuple[CorrelationAverages, ...]
    n_steps: int
    p: float
    theta0: float
    phi0: float
    j: Optional[float] = None
    k: Optional[float] = None

    def means(self, measure: str) -> np.ndarray:
        return np.array([average.mean_of(measure) for average in self.averages])

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for value, average in zip(self.axis_values, self.averages):
            rows.append(
                [
                    value,
                    average.discord_mean,
                    average.discord_std,
                    average.geometric_discord_mean,
                    average.geometric_discord_std,
                    average.q_mean,
                    average.q_std,
                    self.n_steps,
                    value if self.axis == "j" else self.j,
                    value if self.axis == "k" else self.k,
                    self.p,
                    self.theta0,
                    self.phi0,
                ]
            )
        return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


@dataclass(frozen=True)
class PowerLawFit:
    """
    value ~ prefactor * j^(-exponent).

    Attributes:
        exponent: mu, the negated log-log slope
        uncertainty: Standard error of the slope
        prefactor: exp(intercept)
        r_value: Correlation coefficient of the log-log fit
        n_points: Number of points in the fit window
    """

    exponent: float
    uncertainty: float
    prefactor: float
    r_value: float
    n_points: int


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    slope_stderr: float
    intercept_stderr: float
    r_value: float


def build_floquet(spin: SpinLike, k: float, p: float) -> FloquetOperator:
    """
    Build the Floquet operator of the kicked top.

    Args:
        spin: j or its SpinQuantumNumber
        k: Kick strength
        p: Precession angle

    Returns:
        The factored Floquet operator

    Raises:
        CalculationError: If the assembled matrix is not unitary to 1e-11
    """
    operator = FloquetOperator(build_operators(as_spin(spin), p, k))
    residual = LinearAlgebraHelper.unitarity_residual(operator.matrix)
    if residual > ToleranceConstants.UNITARITY:
        raise CalculationError(
            "Floquet operator is not unitary",
            f"j = {operator.spin}, k = {k}, p = {p}, residual {residual:.3e}",
        )
    return operator


def evolve(
    state: SymmetricState, propagator: Propagator, n_steps: int
) -> Iterator[SymmetricState]:
    """
    Yield |psi(1)>, ..., |psi(n_steps)>.

    The vector is renormalised whenever its norm drifts by more than 1e-12.

    Raises:
        ValidationError: If n_steps < 1 or the dimensions differ
    """
    if n_steps < 1:
        raise ValidationError("n_steps must be at least 1", f"n_steps = {n_steps}")
    if propagator.spin.dimension != state.spin.dimension:
        raise ValidationError(
            "State and propagator have different dimensions",
            f"State {state.spin.dimension}, propagator {propagator.spin.dimension}",
        )
    amplitudes = np.array(state.amplitudes)
    for step in range(1, n_steps + 1):
        amplitudes = propagator.apply(amplitudes)
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > ToleranceConstants.RENORMALIZE:
            logger.debug("Renormalising at step %d (norm drift %.3e)", step, norm - 1.0)
            amplitudes = amplitudes / norm
        yield SymmetricState(state.spin, amplitudes)


def mean_spin_direction(state: SymmetricState) -> np.ndarray:
    """Return (<J_x>, <J_y>, <J_z>) / j."""
    expectations = collective_expectations(state, static_operators(state.spin))
    return np.array(
        [expectations.splus.real, expectations.splus.imag, expectations.sz]
    ) / state.spin.j


def correlation_time_series(
    spin: SpinLike,
    k: Optional[float],
    p: Optional[float],
    theta0: float,
    phi0: float,
    n_steps: int,
    normalization: QNormalization = QNormalization.QUBIT,
    propagator: Optional[Propagator] = None,
) -> CorrelationTimeSeries:
    """
    Evolve a coherent state and evaluate D, D^G and Q at every step.

    Args:
        spin: j of the top (N = 2j >= 2)
        k: Kick strength (None when a propagator is given)
        p: Precession angle (None when a propagator is given)
        theta0: Polar angle of the initial coherent state
        phi0: Azimuth of the initial coherent state
        n_steps: Number of kicks T
        normalization: Q normalization
        propagator: Evolution to use instead of the Floquet operator for (k, p)

    Returns:
        The per-step series (t = 0 is not included)

    Raises:
        CalculationError: If D^G < D^2/2 at some step
    """
    spin = as_spin(spin)
    if propagator is None:
        if k is None or p is None:
            raise ValidationError("k and p are required without an explicit propagator")
        propagator = build_floquet(spin, k, p)
    initial = coherent_state(spin, theta0, phi0)

    discord, geometric, q_values = [], [], []
    for step, state in enumerate(evolve(initial, propagator, n_steps), start=1):
        values = correlation_values(state, normalization)
        try:
            values.check_bound()
        except CalculationError as e:
            raise CalculationError(str(e), f"j = {spin}, k = {k}, p = {p}, step {step}")
        discord.append(values.discord)
        geometric.append(values.geometric_discord)
        q_values.append(values.q_measure)

    return CorrelationTimeSeries(
        spin=spin,
        k=None if k is None else float(k),
        p=None if p is None else float(p),
        theta0=float(theta0),
        phi0=float(phi0),
        normalization=QNormalization(normalization),
        steps=np.arange(1, n_steps + 1),
        discord=np.array(discord),
        geometric_discord=np.array(geometric),
        q_measure=np.array(q_values),
    )


def time_averaged_correlations(
    spin: SpinLike,
    k: float,
    p: float,
    theta0: float,
    phi0: float,
    n_steps: int,
    normalization: QNormalization = QNormalization.QUBIT,
) -> CorrelationAverages:
    """Averages of D, D^G and Q over steps 1..T starting from coherent(theta0, phi0)."""
    series = correlation_time_series(spin, k, p, theta0, phi0, n_steps, normalization)
    averages = CorrelationAverages.from_series(series)
    logger.debug(
        "j=%s k=%g p=%g: D=%.4f DG=%.4f Q=%.4f", series.spin, k, p, *averages.means
    )
    return averages


def _average_task(arguments: Tuple) -> CorrelationAverages:
    return time_averaged_correlations(*arguments)


def map_tasks(function: Callable, tasks: Sequence, workers: int = 1) -> List:
    """Map over tasks in order, in worker processes when workers > 1."""
    if workers <= 1 or len(tasks) <= 1:
        return [function(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, tasks))


def sweep_k(
    spin: SpinLike,
    p: float,
    theta0: float,
    phi0: float,
    k_grid: Sequence[float],
    n_steps: int,
    workers: int = 1,
    normalization: QNormalization = QNormalization.QUBIT,
) -> SweepRecord:
    """
    Time-averaged correlations for each kick strength in k_grid.

    Raises:
        ValidationError: If the grid is empty
    """
    if len(k_grid) == 0:
        raise ValidationError("k grid must not be empty")
    spin = as_spin(spin)
    values = sorted(float(k) for k in k_grid)
    tasks = [(spin, k, p, theta0, phi0, n_steps, normalization) for k in values]
    logger.info("Sweeping %d k values at j=%s, p=%g", len(values), spin, p)
    averages = map_tasks(_average_task, tasks, workers)
    return SweepRecord(
        axis="k",
        axis_values=tuple(values),
        averages=tuple(averages),
        n_steps=n_steps,
        p=float(p),
        theta0=float(theta0),
        phi0=float(phi0),
        j=spin.j,
    )


def sweep_j(
    k: float,
    p: float,
    theta0: float,
    phi0: float,
    j_list: Sequence[float],
    n_steps: int = PaperDefaults.SCALING_STEPS,
    workers: int = 1,
    normalization: QNormalization = QNormalization.QUBIT,
) -> SweepRecord:
    """
    Time-averaged correlations for each spin in j_list.

    Raises:
        ValidationError: If the list is empty
    """
    if len(j_list) == 0:
        raise ValidationError("j list must not be empty")
    spins = sorted({as_spin(j) for j in j_list}, key=lambda spin: spin.twice_j)
    tasks = [(spin, k, p, theta0, phi0, n_steps, normalization) for spin in spins]
    logger.info("Sweeping %d j values at k=%g, p=%g", len(spins), k, p)
    averages = map_tasks(_average_task, tasks, workers)
    return SweepRecord(
        axis="j",
        axis_values=tuple(spin.j for spin in spins),
        averages=tuple(averages),
        n_steps=n_steps,
        p=float(p),
        theta0=float(theta0),
        phi0=float(phi0),
        k=float(k),
    )


def fit_power_law(x: Sequence[float], values: Sequence[float]) -> PowerLawFit:
    """
    Least-squares fit of log(values) against log(x).

    Raises:
        ValidationError: With fewer than 5 points or non-positive data
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.shape != values.shape or len(x) < 5:
        raise ValidationError("A power-law fit needs at least 5 points", f"Points: {len(x)}")
    if np.any(x <= 0) or np.any(values <= 0):
        raise ValidationError("Power-law fits need positive data")
    result = linregress(np.log(x), np.log(values))
    return PowerLawFit(
        exponent=float(-result.slope),
        uncertainty=float(result.stderr),
        prefactor=float(np.exp(result.intercept)),
        r_value=float(result.rvalue),
        n_points=len(x),
    )


def power_law_fit(sweep: SweepRecord, j_min: float = 0.0) -> Dict[str, PowerLawFit]:
    """
    Fit D, D^G and Q of a j sweep to power laws in j.

    Args:
        sweep: A sweep along j
        j_min: Smallest j included in the fit

    Returns:
        Fits keyed by 'D', 'DG' and 'Q'
    """
    if sweep.axis != "j":
        raise ValidationError("Power-law fits need a sweep along j", f"Axis: {sweep.axis}")
    j_values = np.array(sweep.axis_values)
    window = j_values >= j_min
    fits = {}
    for measure in MEASURES:
        try:
            fits[measure] = fit_power_law(j_values[window], sweep.means(measure)[window])
        except ValidationError as e:
            raise ValidationError(f"Cannot fit {measure}: {e}", f"j_min = {j_min}")
    return fits


def locate_bifurcation_jump(
    sweep: SweepRecord,
    factor: float = PaperDefaults.JUMP_FACTOR,
    baseline_points: int = PaperDefaults.JUMP_BASELINE_POINTS,
) -> float:
    """
    First k at which the mean discord exceeds `factor` times its baseline.

    The baseline is the mean over the first `baseline_points` grid values.

    Raises:
        CalculationError: If no such jump is present
    """
    if sweep.axis != "k":
        raise ValidationError("Jump detection needs a sweep along k", f"Axis: {sweep.axis}")
    discord = sweep.means("D")
    if len(discord) <= baseline_points:
        raise ValidationError(
            "Sweep too short for jump detection",
            f"{len(discord)} points, baseline {baseline_points}",
        )
    threshold = factor * float(np.mean(discord[:baseline_points]))
    for k, value in zip(sweep.axis_values[baseline_points:], discord[baseline_points:]):
        if value > threshold:
            return float(k)
    raise CalculationError("No jump in mean discord found", f"Threshold: {threshold:.4g}")


def linear_relation_fit(
    discord_means: Sequence[float], geometric_means: Sequence[float]
) -> LinearFit:
    """Least-squares line D^G = slope * D + intercept."""
    if len(discord_means) != len(geometric_means) or len(discord_means) < 3:
        raise ValidationError("A linear fit needs at least 3 paired points")
    result = linregress(np.asarray(discord_means), np.asarray(geometric_means))
    return LinearFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        slope_stderr=float(result.stderr),
        intercept_stderr=float(result.intercept_stderr),
        r_value=float(result.rvalue),
    )


def default_j_grid(
    j_min: float = PaperDefaults.J_GRID_MIN,
    j_max: float = PaperDefaults.J_GRID_MAX,
    n_points: int = PaperDefaults.J_GRID_POINTS,
) -> List[float]:
    """Log-spaced integer j values between j_min and j_max."""
    grid = np.unique(np.rint(np.geomspace(j_min, j_max, n_points)))
    return [float(j) for j in grid]


def write_sweep_csv(sweep: SweepRecord, path: Union[str, Path]) -> Path:
    """Write a sweep with header axis_value,D_mean,...,theta0,phi0."""
    path = Path(path)
    sweep.to_frame().to_csv(path, index=False, float_format=OutputConstants.FLOAT_FORMAT)
    return path
