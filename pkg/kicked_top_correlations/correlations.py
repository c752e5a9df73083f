"""
Quantum discord, geometric discord and the Meyer-Wallach Q measure.

Entropies are in nats. Discord is D(B:A), i.e. the measurement acts on qubit A.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr
from scipy.stats import entropy

from kicked_top_correlations.constants import DiscordConstants, ToleranceConstants
from kicked_top_correlations.errors import CalculationError, ValidationError
from kicked_top_correlations.spin_algebra import (
    SymmetricState,
    collective_expectations,
    static_operators,
)
from kicked_top_correlations.symmetric_reduction import (
    OneQubitDensityMatrix,
    TwoQubitDensityMatrix,
    clip_density_matrix,
    one_qubit_rdm,
    partial_trace,
    two_qubit_rdm,
)
from kicked_top_correlations.utils import LinearAlgebraHelper

logger = logging.getLogger(__name__)

DensityMatrixLike = Union[np.ndarray, OneQubitDensityMatrix, TwoQubitDensityMatrix]

IDENTITY = np.eye(2, dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA_A = np.stack([np.kron(sigma, IDENTITY) for sigma in PAULI])
SIGMA_B = np.stack([np.kron(IDENTITY, sigma) for sigma in PAULI])
SIGMA_AB = np.stack([[np.kron(a, b) for b in PAULI] for a in PAULI])


class QNormalization(str, Enum):
    """Denominator used when Q is written through collective spin expectations."""

    DIMENSION = "paper_2jplus1"
    QUBIT = "qubit_2j"


@dataclass(frozen=True, eq=False)
class BlochForm:
    """
    Bloch representation of a two-qubit state.

    rho = 1/4 (I(x)I + sum_i x_i s_i(x)I + sum_i y_i I(x)s_i + sum_ij T_ij s_i(x)s_j)

    Attributes:
        x: Bloch vector of qubit A
        y: Bloch vector of qubit B
        t: 3 x 3 correlation matrix
    """

    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float).reshape(3)
        y = np.asarray(self.y, dtype=float).reshape(3)
        t = np.asarray(self.t, dtype=float).reshape(3, 3)
        bound = 1.0 + ToleranceConstants.NORM
        if np.max(np.abs(np.concatenate([x, y, t.ravel()]))) > bound:
            raise ValidationError("Bloch components must lie in [-1, 1]")
        object.__setattr__(self, "x", LinearAlgebraHelper.read_only(x))
        object.__setattr__(self, "y", LinearAlgebraHelper.read_only(y))
        object.__setattr__(self, "t", LinearAlgebraHelper.read_only(t))

    def to_density_matrix(self) -> np.ndarray:
        """Rebuild the 4 x 4 density matrix."""
        matrix = np.kron(IDENTITY, IDENTITY).astype(complex)
        matrix += np.einsum("i,iab->ab", self.x, SIGMA_A)
        matrix += np.einsum("i,iab->ab", self.y, SIGMA_B)
        matrix += np.einsum("ij,ijab->ab", self.t, SIGMA_AB)
        return matrix / 4


@dataclass(frozen=True)
class MeasurementSetting:
    """
    Rank-1 orthogonal measurement on qubit A, Pi_+- = (I +- n.sigma)/2.

    Attributes:
        theta: Polar angle of the Bloch axis n
        phi: Azimuth of the Bloch axis n
    """

    theta: float
    phi: float

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "MeasurementSetting":
        if not (np.isfinite(theta) and np.isfinite(phi)):
            raise ValidationError("Measurement angles must be finite", f"({theta}, {phi})")
        return cls(float(theta), float(phi))

    @property
    def axis(self) -> np.ndarray:
        return _axes(np.array([self.theta]), np.array([self.phi]))[0]

    def projectors(self) -> Tuple[np.ndarray, np.ndarray]:
        n_sigma = np.einsum("i,iab->ab", self.axis, PAULI)
        return (IDENTITY + n_sigma) / 2, (IDENTITY - n_sigma) / 2


@dataclass(frozen=True)
class CorrelationValues:
    """
    The three correlation measures of one state.

    Attributes:
        discord: Quantum discord D in nats
        geometric_discord: Geometric discord D^G
        q_measure: Meyer-Wallach Q
    """

    discord: float
    geometric_discord: float
    q_measure: float

    def satisfies_bound(self, slack: float = ToleranceConstants.DISCORD_BOUND_SLACK) -> bool:
        """Whether D^G >= D^2 / 2 holds up to `slack`."""
        return self.geometric_discord >= self.discord**2 / 2 - slack

    def check_bound(self) -> None:
        """
        Raises:
            CalculationError: If D^G < D^2 / 2 beyond the slack
        """
        if not self.satisfies_bound():
            raise CalculationError(
                "Geometric discord violates D^G >= D^2/2",
                f"D = {self.discord:.12g}, D^G = {self.geometric_discord:.12g}",
            )


def _axes(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    sin_theta = np.sin(theta)
    return np.column_stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), np.cos(theta)])


def _as_matrix(rho: DensityMatrixLike) -> np.ndarray:
    if isinstance(rho, (OneQubitDensityMatrix, TwoQubitDensityMatrix)):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def _validated(rho: DensityMatrixLike) -> np.ndarray:
    matrix = _as_matrix(rho)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError("Density matrix must be square", f"Shape: {matrix.shape}")
    if LinearAlgebraHelper.max_norm(matrix - matrix.conj().T) > ToleranceConstants.HERMITICITY:
        raise ValidationError("Density matrix must be Hermitian")
    trace = np.trace(matrix)
    if abs(trace - 1.0) > ToleranceConstants.TRACE:
        raise ValidationError("Density matrix must have unit trace", f"Trace: {trace}")
    return matrix


def _two_qubit(rho: DensityMatrixLike) -> np.ndarray:
    matrix = _validated(rho)
    if matrix.shape != (4, 4):
        raise ValidationError("Expected a two-qubit (4 x 4) state", f"Shape: {matrix.shape}")
    return matrix


def _binary_entropy(probability: np.ndarray) -> np.ndarray:
    probability = np.clip(probability, 0.0, 1.0)
    return entr(probability) + entr(1.0 - probability)


def von_neumann_entropy(rho: DensityMatrixLike) -> float:
    """
    Return -Tr(rho ln rho).

    Eigenvalues below 1e-14 are dropped, so 0 log 0 = 0.

    Args:
        rho: Density matrix (array or reduced-state object)

    Returns:
        The entropy in nats

    Raises:
        ValidationError: If rho is not Hermitian, not unit trace or not PSD
    """
    eigenvalues, _ = clip_density_matrix(_validated(rho))
    support = eigenvalues[eigenvalues > ToleranceConstants.EIGENVALUE_FLOOR]
    return float(entropy(support))


def mutual_information(rho: DensityMatrixLike) -> float:
    """Return H(A) + H(B) - H(AB) for a two-qubit state."""
    matrix = _two_qubit(rho)
    return (
        von_neumann_entropy(partial_trace(matrix, 0))
        + von_neumann_entropy(partial_trace(matrix, 1))
        - von_neumann_entropy(matrix)
    )


def conditional_entropy_after_measurement(
    rho: DensityMatrixLike, setting: MeasurementSetting
) -> float:
    """
    Average entropy of qubit B after measuring qubit A along `setting`.

    Args:
        rho: Two-qubit state
        setting: Measurement axis on qubit A

    Returns:
        sum_+- p_+- H(rho_B|+-); outcomes with p < 1e-14 contribute nothing
    """
    matrix = _two_qubit(rho)
    total = 0.0
    for projector in setting.projectors():
        lifted = np.kron(projector, IDENTITY)
        probability = float(np.real(np.trace(lifted @ matrix)))
        if probability < ToleranceConstants.EIGENVALUE_FLOOR:
            continue
        conditional = partial_trace(lifted @ matrix @ lifted, 1) / probability
        total += probability * von_neumann_entropy(0.5 * (conditional + conditional.conj().T))
    return total


def bloch_decompose(rho: DensityMatrixLike) -> BlochForm:
    """
    Decompose a two-qubit state into x_i, y_i and T_ij.

    Args:
        rho: Two-qubit state

    Returns:
        The Bloch form (imaginary parts below 1e-12 are discarded)
    """
    matrix = _two_qubit(rho)
    x = np.einsum("iab,ba->i", SIGMA_A, matrix)
    y = np.einsum("iab,ba->i", SIGMA_B, matrix)
    t = np.einsum("ijab,ba->ij", SIGMA_AB, matrix)
    return BlochForm(x.real, y.real, t.real)


def _measured_conditional_entropy(form: BlochForm, axes: np.ndarray) -> np.ndarray:
    """
    Vectorised conditional entropy for many measurement axes at once.

    Outcome +- has probability (1 +- n.x)/2 and leaves qubit B with Bloch
    vector (y +- T^T n)/(1 +- n.x).
    """
    projected_x = axes @ form.x
    correlated = axes @ form.t
    result = np.zeros(axes.shape[0])
    for sign in (1.0, -1.0):
        weight = 1.0 + sign * projected_x
        probability = weight / 2
        vectors = form.y[None, :] + sign * correlated
        length = np.linalg.norm(vectors, axis=1)
        usable = probability > ToleranceConstants.EIGENVALUE_FLOOR
        radius = np.zeros_like(length)
        radius[usable] = np.minimum(length[usable] / weight[usable], 1.0)
        contribution = probability * _binary_entropy((1.0 + radius) / 2)
        result += np.where(usable, contribution, 0.0)
    return result


def optimal_measurement(rho: DensityMatrixLike) -> Tuple[MeasurementSetting, float]:
    """
    Minimise the post-measurement conditional entropy over projective measurements on A.

    A fixed 32 x 64 grid over the Bloch sphere is searched first; Nelder-Mead then
    refines the best three grid points.

    Args:
        rho: Two-qubit state

    Returns:
        The minimising measurement and the minimal conditional entropy
    """
    form = bloch_decompose(rho)
    thetas = np.linspace(0.0, np.pi, DiscordConstants.GRID_THETA)
    phis = np.linspace(-np.pi, np.pi, DiscordConstants.GRID_PHI, endpoint=False)
    theta_grid, phi_grid = np.meshgrid(thetas, phis, indexing="ij")
    theta_flat, phi_flat = theta_grid.ravel(), phi_grid.ravel()
    values = _measured_conditional_entropy(form, _axes(theta_flat, phi_flat))

    def objective(angles: np.ndarray) -> float:
        return float(
            _measured_conditional_entropy(form, _axes(angles[:1], angles[1:]))[0]
        )

    best_index = int(np.argmin(values))
    best = (theta_flat[best_index], phi_flat[best_index], float(values[best_index]))
    for index in np.argsort(values, kind="stable")[: DiscordConstants.REFINE_STARTS]:
        outcome = minimize(
            objective,
            x0=np.array([theta_flat[index], phi_flat[index]]),
            method="Nelder-Mead",
            options={
                "xatol": DiscordConstants.REFINE_ANGLE_TOLERANCE,
                "fatol": DiscordConstants.REFINE_TOLERANCE,
            },
        )
        if outcome.fun < best[2]:
            best = (float(outcome.x[0]), float(outcome.x[1]), float(outcome.fun))

    return MeasurementSetting.from_angles(best[0], best[1]), best[2]


def quantum_discord(rho: DensityMatrixLike) -> float:
    """
    Return D(B:A) = H(A) - H(AB) + min_n H(B|A)_n.

    Args:
        rho: Two-qubit state

    Returns:
        Discord in nats, clamped at zero
    """
    matrix = _two_qubit(rho)
    _, minimum = optimal_measurement(matrix)
    value = von_neumann_entropy(partial_trace(matrix, 0)) - von_neumann_entropy(matrix) + minimum
    if value < -ToleranceConstants.DISCORD_NOISE:
        logger.warning("Discord %.3e below zero beyond numerical noise, clamping", value)
    return max(value, 0.0)


def geometric_discord(rho: DensityMatrixLike) -> float:
    """
    Return D^G = (|x|^2 + ||T||^2 - eta_max) / 4.

    eta_max is the largest eigenvalue of x x^T + T T^T.

    Args:
        rho: Two-qubit state

    Returns:
        The geometric discord, clamped at zero
    """
    form = bloch_decompose(rho)
    kernel = np.outer(form.x, form.x) + form.t @ form.t.T
    eta_max = float(np.linalg.eigvalsh(kernel)[-1])
    value = 0.25 * (form.x @ form.x + np.sum(form.t**2) - eta_max)
    return max(float(value), 0.0)


def q_measure(state: SymmetricState) -> float:
    """Meyer-Wallach Q = 2 (1 - Tr rho_1^2) of a symmetric state."""
    purity = one_qubit_rdm(state).purity
    return float(np.clip(2.0 * (1.0 - purity), 0.0, 1.0))


def q_measure_collective(
    state: SymmetricState, normalization: QNormalization = QNormalization.QUBIT
) -> float:
    """
    Q from collective expectations, 1 - 4 (<S_z>^2 + <S_+><S_->) / denominator.

    Args:
        state: Pure symmetric state
        normalization: QUBIT divides by (2j)^2 and equals q_measure; DIMENSION
            divides by (2j+1)^2

    Returns:
        The Q value
    """
    normalization = QNormalization(normalization)
    expectations = collective_expectations(state, static_operators(state.spin))
    if normalization is QNormalization.QUBIT:
        denominator = float(state.spin.twice_j) ** 2
    else:
        denominator = float(state.spin.twice_j + 1) ** 2
    moment = expectations.sz**2 + (expectations.splus * expectations.sminus).real
    return float(1.0 - 4.0 * moment / denominator)


def correlation_values(
    state: SymmetricState, normalization: QNormalization = QNormalization.QUBIT
) -> CorrelationValues:
    """
    D, D^G and Q of one state of the top, using the reduced state of two qubits.

    Args:
        state: State with N = 2j >= 2
        normalization: Q normalization; QUBIT uses the one-qubit reduced state

    Returns:
        The three measures
    """
    rho = two_qubit_rdm(state)
    if QNormalization(normalization) is QNormalization.QUBIT:
        q_value = q_measure(state)
    else:
        q_value = q_measure_collective(state, normalization)
    return CorrelationValues(
        discord=quantum_discord(rho),
        geometric_discord=geometric_discord(rho),
        q_measure=q_value,
    )
