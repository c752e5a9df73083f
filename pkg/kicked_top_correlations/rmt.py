"""
Random-matrix baselines for the chaotic kicked top.

The Floquet operator commutes with the parity R_y = exp(-i pi J_y), so the
chaotic top is modelled by a block-diagonal circular orthogonal ensemble with
one block per parity sector. Eigenvector statistics follow the model in which
COE eigenvectors are uniformly distributed real unit vectors.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy.linalg as la
import sympy as sp

from kicked_top_correlations.constants import (
    OutputConstants,
    PaperDefaults,
    ToleranceConstants,
)
from kicked_top_correlations.correlations import QNormalization, q_measure_collective
from kicked_top_correlations.errors import CalculationError, ValidationError
from kicked_top_correlations.quantum_dynamics import (
    CorrelationAverages,
    DensePropagator,
    SpinLike,
    as_spin,
    build_floquet,
    correlation_time_series,
    map_tasks,
)
from kicked_top_correlations.spin_algebra import (
    SpinQuantumNumber,
    SymmetricState,
    rotation_operator,
    static_operators,
)
from kicked_top_correlations.utils import ExactMathHelper, LinearAlgebraHelper

logger = logging.getLogger(__name__)

HAAR_MAX_QUBITS = 12
MOMENT_MIN_SAMPLES = 1000
_CHUNK_ENTRIES = 2_000_000

ENSEMBLE_COLUMNS = [
    "j",
    "ensemble",
    "n_samples",
    "seed",
    "D_mean",
    "DG_mean",
    "Q_mean",
    "Q_analytic",
    "stderr_D",
    "stderr_DG",
    "stderr_Q",
]


class Ensemble(str, Enum):
    BLOCK_COE = "block_COE"
    FULL_COE = "full_COE"
    HAAR_SPHERE_REAL = "haar_sphere_real"


class EigenvectorSource(str, Enum):
    COE_SAMPLES = "coe_samples"
    FLOQUET_K_RANGE = "floquet_k_range"
    REAL_UNIT_VECTORS = "real_unit_vectors"


@dataclass(frozen=True, eq=False)
class ParityBasis:
    """
    Eigenbases of the parity operator R_y.

    For half-integer j the operator is i exp(-i pi J_y), so that R_y^2 = I.

    Attributes:
        spin: The spin of the top
        operator: The parity operator in the |j,m> basis
        plus: Orthonormal columns spanning the +1 sector
        minus: Orthonormal columns spanning the -1 sector
    """

    spin: SpinQuantumNumber
    operator: np.ndarray
    plus: np.ndarray
    minus: np.ndarray

    @property
    def plus_dimension(self) -> int:
        return self.plus.shape[1]

    @property
    def minus_dimension(self) -> int:
        return self.minus.shape[1]

    @property
    def transform(self) -> np.ndarray:
        """Unitary whose columns are the + basis followed by the - basis."""
        return np.hstack([self.plus, self.minus])

    def sectors(self) -> Dict[str, np.ndarray]:
        return {"+": self.plus, "-": self.minus}


@dataclass(frozen=True)
class EnsembleSpec:
    """
    Random-matrix ensemble and its sampling stream.

    Attributes:
        spin: The spin of the modelled top
        n_samples: Number of independent samples
        rng_seed: Non-negative seed; it fixes the whole sample stream
        ensemble: Which ensemble to sample
    """

    spin: SpinQuantumNumber
    n_samples: int
    rng_seed: int
    ensemble: Ensemble = Ensemble.BLOCK_COE

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValidationError("n_samples must be at least 1", f"n_samples = {self.n_samples}")
        if self.rng_seed < 0 or self.rng_seed >= 2**64:
            raise ValidationError("rng_seed must be a 64-bit unsigned integer", f"{self.rng_seed}")
        object.__setattr__(self, "ensemble", Ensemble(self.ensemble))


@dataclass(frozen=True)
class EnsembleAverages:
    """
    Correlations of coherent states evolved by random-matrix samples.

    Attributes:
        spec: The sampled ensemble
        averages: Means and standard deviations pooled over all steps of all samples
        stderr_discord, stderr_geometric_discord, stderr_q: Standard errors of the means
        q_analytic: Exact ensemble average of Q
    """

    spec: EnsembleSpec
    averages: CorrelationAverages
    stderr_discord: float
    stderr_geometric_discord: float
    stderr_q: float
    q_analytic: float


@dataclass(frozen=True)
class EigenvectorQStatistics:
    """
    Mean Q over eigenvectors.

    Attributes:
        mean: Mean Q over all eigenvectors
        stderr: Standard error from the spread of per-matrix means
        n_vectors: Number of eigenvectors
        n_matrices: Number of diagonalised matrices (vectors for the real model)
        sector_means: Mean per parity sector when resolved
    """

    mean: float
    stderr: float
    n_vectors: int
    n_matrices: int
    sector_means: Optional[Dict[str, float]] = None


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo estimate of an ensemble average with its reference value."""

    mean: float
    stderr: float
    expected: float

    def within(self, n_sigma: float = 3.0) -> bool:
        return abs(self.mean - self.expected) <= n_sigma * self.stderr


@dataclass(frozen=True)
class SpacingRatioStatistics:
    mean: float
    stderr: float
    n_ratios: int


@lru_cache(maxsize=32)
def _parity_basis(twice_j: int) -> ParityBasis:
    spin = SpinQuantumNumber(twice_j)
    operator = rotation_operator(spin, np.pi)
    if spin.is_integer:
        operator = operator.real.astype(complex)
    else:
        operator = 1j * operator
    hermitian = 0.5 * (operator + operator.conj().T)
    if spin.is_integer:
        eigenvalues, eigenvectors = la.eigh(hermitian.real)
        eigenvectors = eigenvectors.astype(complex)
    else:
        eigenvalues, eigenvectors = la.eigh(hermitian)

    distance = np.minimum(np.abs(eigenvalues - 1.0), np.abs(eigenvalues + 1.0))
    if np.max(distance) > ToleranceConstants.PARITY_EIGENVALUE:
        raise CalculationError(
            "Parity eigenvalues are not +-1", f"j = {spin}, worst deviation {np.max(distance):.3e}"
        )
    return ParityBasis(
        spin=spin,
        operator=LinearAlgebraHelper.read_only(operator),
        plus=LinearAlgebraHelper.read_only(eigenvectors[:, eigenvalues > 0]),
        minus=LinearAlgebraHelper.read_only(eigenvectors[:, eigenvalues < 0]),
    )


def parity_basis(spin: SpinLike) -> ParityBasis:
    """
    Diagonalise R_y = exp(-i pi J_y) into its +1 and -1 sectors.

    Raises:
        CalculationError: If an eigenvalue is further than 1e-6 from +-1
    """
    return _parity_basis(as_spin(spin).twice_j)


def ensemble_streams(spec: EnsembleSpec) -> List[np.random.Generator]:
    """One independent generator per sample index, derived from the spec seed."""
    children = np.random.SeedSequence(spec.rng_seed).spawn(spec.n_samples)
    return [np.random.default_rng(child) for child in children]


def sample_cue(dim: int, rng: np.random.Generator) -> np.ndarray:
    """
    Haar-random unitary from the QR decomposition of a complex Gaussian matrix.

    The phases of R's diagonal are moved into Q so that the result is Haar distributed.
    """
    if dim < 1:
        raise ValidationError("Dimension must be at least 1", f"dim = {dim}")
    gaussian = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = la.qr(gaussian)
    diagonal = np.diagonal(r)
    return q * (diagonal / np.abs(diagonal))


def sample_coe(dim: int, rng: np.random.Generator) -> np.ndarray:
    """COE matrix W = U^T U with U drawn from the CUE."""
    unitary = sample_cue(dim, rng)
    return unitary.T @ unitary


def sample_block_coe(
    spec: EnsembleSpec, basis: ParityBasis, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """
    Block-diagonal COE sample, one independent block per parity sector.

    Args:
        spec: Ensemble specification (must be block_COE)
        basis: Parity basis of the same spin
        rng: Generator to draw from (the first stream of the spec if omitted)

    Returns:
        The sample written in the |j,m> basis
    """
    if spec.ensemble is not Ensemble.BLOCK_COE:
        raise ValidationError("Spec is not a block COE ensemble", f"Ensemble: {spec.ensemble.value}")
    if basis.spin != spec.spin:
        raise ValidationError("Parity basis and spec use different spins")
    rng = rng if rng is not None else ensemble_streams(spec)[0]
    blocks = la.block_diag(
        sample_coe(basis.plus_dimension, rng), sample_coe(basis.minus_dimension, rng)
    )
    transform = basis.transform
    return transform @ blocks @ transform.conj().T


def sample_unitary(
    spec: EnsembleSpec, rng: np.random.Generator, basis: Optional[ParityBasis] = None
) -> np.ndarray:
    """Draw one unitary from the spec's ensemble."""
    if spec.ensemble is Ensemble.BLOCK_COE:
        return sample_block_coe(spec, basis if basis is not None else parity_basis(spec.spin), rng)
    if spec.ensemble is Ensemble.FULL_COE:
        return sample_coe(spec.spin.dimension, rng)
    raise ValidationError(
        "Ensemble does not define unitaries", f"Ensemble: {spec.ensemble.value}"
    )


def analytic_q_average_exact(
    spin: SpinLike, normalization: QNormalization = QNormalization.DIMENSION
) -> sp.Rational:
    """
    Exact ensemble average of Q for uniformly random real eigenvectors.

    DIMENSION: 1 - 16 j (j+1) / (3 (2j+3) (2j+1)^2)
    QUBIT: 1 - 4 (j+1) / (3 j (2j+3))
    """
    j = as_spin(spin).exact_j
    if QNormalization(normalization) is QNormalization.DIMENSION:
        return 1 - 16 * j * (j + 1) / (3 * (2 * j + 3) * (2 * j + 1) ** 2)
    return 1 - 4 * (j + 1) / (3 * j * (2 * j + 3))


def analytic_q_average(
    spin: SpinLike, normalization: QNormalization = QNormalization.DIMENSION
) -> float:
    return ExactMathHelper.to_float(analytic_q_average_exact(spin, normalization))


def _coe_sample_task(arguments: Tuple) -> Tuple[List[float], List[float], List[float]]:
    spec, rng, theta0, phi0, n_steps, normalization = arguments
    unitary = sample_unitary(spec, rng)
    series = correlation_time_series(
        spec.spin,
        None,
        None,
        theta0,
        phi0,
        n_steps,
        normalization,
        propagator=DensePropagator(spec.spin, unitary),
    )
    return (
        series.discord.tolist(),
        series.geometric_discord.tolist(),
        series.q_measure.tolist(),
    )


def coe_time_average(
    spec: EnsembleSpec,
    theta0: float,
    phi0: float,
    n_steps: int,
    normalization: QNormalization = QNormalization.QUBIT,
    workers: int = 1,
) -> EnsembleAverages:
    """
    Time averages of D, D^G and Q under random-matrix evolution.

    Each sample evolves coherent(theta0, phi0) for n_steps; all steps of all
    samples are pooled. With one sample the standard errors use the step
    spread, otherwise the spread of per-sample means.
    """
    if n_steps < 1:
        raise ValidationError("n_steps must be at least 1", f"n_steps = {n_steps}")
    tasks = [
        (spec, rng, theta0, phi0, n_steps, normalization) for rng in ensemble_streams(spec)
    ]
    logger.info(
        "Evolving %d %s samples at j=%s for %d steps",
        spec.n_samples,
        spec.ensemble.value,
        spec.spin,
        n_steps,
    )
    results = map_tasks(_coe_sample_task, tasks, workers)
    pooled = [np.concatenate([np.asarray(result[index]) for result in results]) for index in range(3)]
    averages = CorrelationAverages(
        discord_mean=float(np.mean(pooled[0])),
        discord_std=float(np.std(pooled[0])),
        geometric_discord_mean=float(np.mean(pooled[1])),
        geometric_discord_std=float(np.std(pooled[1])),
        q_mean=float(np.mean(pooled[2])),
        q_std=float(np.std(pooled[2])),
        n_steps=n_steps,
    )

    stderrs = []
    for index in range(3):
        if len(results) > 1:
            sample_means = [np.mean(result[index]) for result in results]
            stderrs.append(float(np.std(sample_means, ddof=1) / np.sqrt(len(results))))
        else:
            stderrs.append(float(np.std(pooled[index]) / np.sqrt(len(pooled[index]))))

    return EnsembleAverages(
        spec=spec,
        averages=averages,
        stderr_discord=stderrs[0],
        stderr_geometric_discord=stderrs[1],
        stderr_q=stderrs[2],
        q_analytic=analytic_q_average(spec.spin, normalization),
    )


def ensemble_frame(results: Sequence[EnsembleAverages]) -> pd.DataFrame:
    rows = [
        [
            result.spec.spin.j,
            result.spec.ensemble.value,
            result.spec.n_samples,
            result.spec.rng_seed,
            result.averages.discord_mean,
            result.averages.geometric_discord_mean,
            result.averages.q_mean,
            result.q_analytic,
            result.stderr_discord,
            result.stderr_geometric_discord,
            result.stderr_q,
        ]
        for result in results
    ]
    return pd.DataFrame(rows, columns=ENSEMBLE_COLUMNS)


def write_ensemble_csv(results: Sequence[EnsembleAverages], path: Union[str, Path]) -> Path:
    path = Path(path)
    ensemble_frame(results).to_csv(path, index=False, float_format=OutputConstants.FLOAT_FORMAT)
    return path


def _eigenvectors(matrix: np.ndarray) -> np.ndarray:
    # the Schur vectors of a normal matrix are orthonormal eigenvectors
    _, vectors = la.schur(matrix, output="complex")
    return vectors


def _vector_q(spin: SpinQuantumNumber, vector: np.ndarray, normalization: QNormalization) -> float:
    state = SymmetricState(spin, vector / np.linalg.norm(vector))
    return q_measure_collective(state, normalization)


def _matrix_eigenvector_q(
    spin: SpinQuantumNumber,
    matrix: np.ndarray,
    normalization: QNormalization,
    basis: Optional[ParityBasis],
) -> Dict[str, List[float]]:
    if basis is None:
        vectors = _eigenvectors(matrix)
        return {"all": [_vector_q(spin, vectors[:, i], normalization) for i in range(vectors.shape[1])]}

    values = {}
    for sector, columns in basis.sectors().items():
        block = columns.conj().T @ matrix @ columns
        vectors = columns @ _eigenvectors(block)
        values[sector] = [
            _vector_q(spin, vectors[:, i], normalization) for i in range(vectors.shape[1])
        ]
    return values


def real_unit_vectors(dim: int, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random real unit vectors as rows of an (n_samples, dim) array."""
    gaussian = rng.standard_normal((n_samples, dim))
    return gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)


def eigenvector_q_statistics(
    source: Union[EigenvectorSource, str],
    spin: SpinLike,
    n_samples: int = 100,
    seed: int = 0,
    p: float = PaperDefaults.P_GENERIC,
    k_values: Optional[Sequence[float]] = None,
    ensemble: Union[Ensemble, str] = Ensemble.FULL_COE,
    normalization: QNormalization = QNormalization.DIMENSION,
    parity_resolved: bool = False,
) -> EigenvectorQStatistics:
    """
    Average Q over eigenvectors of random matrices or Floquet operators.

    Block-COE eigenvectors are parity eigenstates with real amplitudes for
    integer j, so every component of <J> vanishes and Q is exactly 1 under the
    DIMENSION normalization. Use the full COE or real_unit_vectors for the
    ensemble average.

    Args:
        source: coe_samples (n_samples matrices from `ensemble`), floquet_k_range
            (Floquet operators for k_values, default n_samples values spread over
            [10, 1000]) or real_unit_vectors (n_samples random real vectors)
        spin: j of the top
        n_samples: Number of matrices or vectors
        seed: Seed of the random streams
        p: Precession angle of the Floquet operators
        k_values: Explicit kick strengths for floquet_k_range
        ensemble: Random-matrix ensemble for coe_samples
        normalization: Q normalization (the analytic average uses DIMENSION by default)
        parity_resolved: Diagonalise each parity block separately and report per-sector means

    Returns:
        Mean Q, its standard error and the number of eigenvectors
    """
    source = EigenvectorSource(source)
    spin = as_spin(spin)
    normalization = QNormalization(normalization)

    if source is EigenvectorSource.REAL_UNIT_VECTORS:
        rng = np.random.default_rng(seed)
        vectors = real_unit_vectors(spin.dimension, n_samples, rng)
        values = np.array([_vector_q(spin, vector, normalization) for vector in vectors])
        return EigenvectorQStatistics(
            mean=float(np.mean(values)),
            stderr=float(np.std(values, ddof=1) / np.sqrt(len(values))) if len(values) > 1 else 0.0,
            n_vectors=len(values),
            n_matrices=len(values),
        )

    if source is EigenvectorSource.FLOQUET_K_RANGE:
        if k_values is None:
            k_values = np.linspace(PaperDefaults.EIGVEC_K_MIN, PaperDefaults.EIGVEC_K_MAX, n_samples)
        matrices = [build_floquet(spin, float(k), p).matrix for k in k_values]
    else:
        spec = EnsembleSpec(spin, n_samples, seed, Ensemble(ensemble))
        matrices = [sample_unitary(spec, rng) for rng in ensemble_streams(spec)]
    if not matrices:
        raise ValidationError("No matrices to diagonalise")

    basis = parity_basis(spin) if parity_resolved else None
    per_matrix_means = []
    by_sector: Dict[str, List[float]] = {}
    for matrix in matrices:
        sector_values = _matrix_eigenvector_q(spin, matrix, normalization, basis)
        flat = [value for values in sector_values.values() for value in values]
        per_matrix_means.append(np.mean(flat))
        for sector, values in sector_values.items():
            by_sector.setdefault(sector, []).extend(values)

    all_values = np.concatenate([np.asarray(values) for values in by_sector.values()])
    stderr = (
        float(np.std(per_matrix_means, ddof=1) / np.sqrt(len(per_matrix_means)))
        if len(per_matrix_means) > 1
        else 0.0
    )
    return EigenvectorQStatistics(
        mean=float(np.mean(all_values)),
        stderr=stderr,
        n_vectors=len(all_values),
        n_matrices=len(matrices),
        sector_means={sector: float(np.mean(values)) for sector, values in by_sector.items()}
        if parity_resolved
        else None,
    )


def _chunks(n_samples: int, dim: int) -> List[int]:
    size = max(1, _CHUNK_ENTRIES // dim)
    full, rest = divmod(n_samples, size)
    return [size] * full + ([rest] if rest else [])


def _estimate(per_sample: np.ndarray, expected: float) -> MomentEstimate:
    return MomentEstimate(
        mean=float(np.mean(per_sample)),
        stderr=float(np.std(per_sample, ddof=1) / np.sqrt(len(per_sample))),
        expected=expected,
    )


def component_moment_check(
    spin: SpinLike, n_samples: int, seed: int = 0
) -> Tuple[MomentEstimate, MomentEstimate]:
    """
    Monte Carlo moments of random real unit vectors in dimension d = 2j+1.

    Returns:
        (<a_m^4>, <a_m^2 a_n^2>) estimates against 3/(d(d+2)) and 1/(d(d+2));
        the cross moment averages neighbouring components

    Raises:
        ValidationError: If n_samples < 1000
    """
    if n_samples < MOMENT_MIN_SAMPLES:
        raise ValidationError(
            f"At least {MOMENT_MIN_SAMPLES} samples are required", f"n_samples = {n_samples}"
        )
    spin = as_spin(spin)
    dim = spin.dimension
    rng = np.random.default_rng(seed)
    fourth, cross = [], []
    for size in _chunks(n_samples, dim):
        vectors = real_unit_vectors(dim, size, rng)
        squares = vectors**2
        fourth.append(np.mean(squares**2, axis=1))
        cross.append(np.mean(squares[:, :-1] * squares[:, 1:], axis=1))

    denominator = dim * (dim + 2)
    return (
        _estimate(np.concatenate(fourth), 3.0 / denominator),
        _estimate(np.concatenate(cross), 1.0 / denominator),
    )


def ensemble_collective_averages(
    spin: SpinLike, n_samples: int, seed: int = 0
) -> Tuple[MomentEstimate, MomentEstimate]:
    """
    Ensemble averages of <S_z>^2 and <S_+><S_-> over random real unit vectors.

    Both converge to 2j(j+1) / (3(2j+3)).
    """
    spin = as_spin(spin)
    dim = spin.dimension
    m = spin.m_values
    raising = np.diagonal(static_operators(spin).jplus, 1).real
    rng = np.random.default_rng(seed)
    sz_squared, plus_minus = [], []
    for size in _chunks(n_samples, dim):
        vectors = real_unit_vectors(dim, size, rng)
        sz_squared.append((vectors**2 @ m) ** 2)
        splus = (vectors[:, :-1] * vectors[:, 1:]) @ raising
        plus_minus.append(splus**2)

    j = spin.j
    expected = 2 * j * (j + 1) / (3 * (2 * j + 3))
    return (
        _estimate(np.concatenate(sz_squared), expected),
        _estimate(np.concatenate(plus_minus), expected),
    )


def verify_summation_identities(max_twice_j: int = 200) -> List[int]:
    """
    Check, in exact rational arithmetic, for 2j = 1..max_twice_j:

        sum_{m=-j}^{j} m^2 = j(j+1)(2j+1)/3
        sum_{m=-j}^{j-1} (j-m)(j+m+1) = 2j(j^2+j) + j + j^2 - j(j+1)(2j+1)/3

    Returns:
        The values of 2j where an identity fails (empty when all hold)
    """
    failures = []
    for twice_j in range(1, max_twice_j + 1):
        j = ExactMathHelper.half_integer(twice_j)
        m_values = [j - step for step in range(twice_j + 1)]
        squares = sum(m**2 for m in m_values)
        ladder = sum((j - m) * (j + m + 1) for m in m_values if m != j)
        cubic = j * (j + 1) * (2 * j + 1) / 3
        if squares != cubic or ladder != 2 * j * (j**2 + j) + j + j**2 - cubic:
            failures.append(twice_j)
    if failures:
        logger.warning("Summation identities fail for 2j in %s", failures)
    return failures


def haar_q_exact(n_qubits: int) -> float:
    """Exact Haar average of Q, 1 - 3/(2^N + 1)."""
    return 1.0 - 3.0 / (2**n_qubits + 1)


def haar_q_reference(
    n_qubits: int, n_samples: int, seed: int = 0
) -> Tuple[MomentEstimate, float]:
    """
    Monte Carlo mean of Q over Haar-random pure states of N qubits.

    Returns:
        The estimate (expected value 1 - 3/2^N) and the exact finite-N average

    Raises:
        ValidationError: If N is outside 1..12
    """
    if not 1 <= n_qubits <= HAAR_MAX_QUBITS:
        raise ValidationError(
            f"N must lie between 1 and {HAAR_MAX_QUBITS}", f"N = {n_qubits}"
        )
    if n_samples < 2:
        raise ValidationError("At least 2 samples are required", f"n_samples = {n_samples}")
    dim = 2**n_qubits
    rng = np.random.default_rng(seed)
    values = []
    for size in _chunks(n_samples, dim):
        states = rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))
        states /= np.linalg.norm(states, axis=1, keepdims=True)
        tensors = states.reshape((size,) + (2,) * n_qubits)
        purity = np.zeros(size)
        for qubit in range(n_qubits):
            matrix = np.moveaxis(tensors, qubit + 1, 1).reshape(size, 2, -1)
            reduced = matrix @ np.conj(np.swapaxes(matrix, 1, 2))
            purity += np.sum(np.abs(reduced) ** 2, axis=(1, 2))
        values.append(2.0 * (1.0 - purity / n_qubits))
    estimate = _estimate(np.concatenate(values), 1.0 - 3.0 / dim)
    return estimate, haar_q_exact(n_qubits)


def spacing_ratios(eigenphases: np.ndarray) -> np.ndarray:
    """Ratios min(s_n, s_n+1) / max(s_n, s_n+1) of consecutive spacings on the circle."""
    phases = np.sort(np.mod(eigenphases, 2 * np.pi))
    if len(phases) < 3:
        return np.empty(0)
    spacings = np.diff(np.append(phases, phases[0] + 2 * np.pi))
    following = np.roll(spacings, -1)
    larger = np.maximum(spacings, following)
    usable = larger > 0
    return np.minimum(spacings, following)[usable] / larger[usable]


def spacing_ratio_statistics(
    unitaries: Sequence[np.ndarray], basis: Optional[ParityBasis] = None
) -> SpacingRatioStatistics:
    """
    Pooled eigenphase spacing ratios, per parity block when a basis is given.
    """
    ratios = []
    for unitary in unitaries:
        blocks = (
            [columns.conj().T @ unitary @ columns for columns in basis.sectors().values()]
            if basis is not None
            else [unitary]
        )
        for block in blocks:
            ratios.append(spacing_ratios(np.angle(la.eigvals(block))))
    pooled = np.concatenate(ratios) if ratios else np.empty(0)
    if len(pooled) < 2:
        raise CalculationError("Not enough eigenphases for spacing statistics")
    return SpacingRatioStatistics(
        mean=float(np.mean(pooled)),
        stderr=float(np.std(pooled, ddof=1) / np.sqrt(len(pooled))),
        n_ratios=len(pooled),
    )
