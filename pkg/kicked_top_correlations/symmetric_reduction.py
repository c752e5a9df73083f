"""
One- and two-qubit reduced density matrices of permutation-symmetric states.

A Dicke state with kappa up spins splits across the first two qubits and the
remaining N - 2 as

    |D_N^kappa> = sum_q sqrt(w_q(kappa)) |D_2^q> (x) |D_{N-2}^{kappa-q}>,
    w_q(kappa) = C(2,q) C(N-2,kappa-q) / C(N,kappa),

and the basis index i of |j,m> corresponds to kappa = j + m = N - i.
Two-qubit matrices use the product basis |uu>, |ud>, |du>, |dd>.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.special import comb

from kicked_top_correlations.constants import ToleranceConstants
from kicked_top_correlations.errors import ValidationError
from kicked_top_correlations.spin_algebra import SymmetricState, static_operators
from kicked_top_correlations.utils import ExactMathHelper, LinearAlgebraHelper

BRUTE_FORCE_MAX_QUBITS = 14

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

# columns: |D_2^2> = |uu>, |D_2^1> = (|ud> + |du>)/sqrt(2), |D_2^0> = |dd>
_PAIR_DICKE_BASIS = np.array(
    [
        [1, 0, 0],
        [0, 1 / np.sqrt(2), 0],
        [0, 1 / np.sqrt(2), 0],
        [0, 0, 1],
    ],
    dtype=complex,
)


def _check_density_matrix(matrix: np.ndarray, size: int) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (size, size):
        raise ValidationError(
            "Density matrix has the wrong shape", f"Expected {(size, size)}, got {matrix.shape}"
        )
    if LinearAlgebraHelper.max_norm(matrix - matrix.conj().T) > ToleranceConstants.HERMITICITY:
        raise ValidationError("Density matrix must be Hermitian")
    trace = np.trace(matrix).real
    if abs(trace - 1.0) > ToleranceConstants.TRACE:
        raise ValidationError("Density matrix must have unit trace", f"Trace: {trace}")
    lowest = float(np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))[0])
    if lowest < -ToleranceConstants.POSITIVITY:
        raise ValidationError(
            "Density matrix must be positive semidefinite", f"Minimum eigenvalue: {lowest:.3e}"
        )
    return matrix


@dataclass(frozen=True, eq=False)
class OneQubitDensityMatrix:
    """Reduced state of a single qubit (2 x 2)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "matrix", LinearAlgebraHelper.read_only(_check_density_matrix(self.matrix, 2))
        )

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @property
    def bloch_vector(self) -> np.ndarray:
        rho = self.matrix
        return np.array(
            [2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]
        )


@dataclass(frozen=True, eq=False)
class TwoQubitDensityMatrix:
    """Reduced state of two qubits (4 x 4) in the basis |uu>, |ud>, |du>, |dd>."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "matrix", LinearAlgebraHelper.read_only(_check_density_matrix(self.matrix, 4))
        )

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    @property
    def singlet_population(self) -> float:
        singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
        return float(np.real(singlet @ self.matrix @ singlet))

    def swapped(self) -> np.ndarray:
        return SWAP @ self.matrix @ SWAP

    def marginal(self, keep: int) -> OneQubitDensityMatrix:
        """Reduced state of qubit `keep` (0 for A, 1 for B)."""
        return OneQubitDensityMatrix(partial_trace(self.matrix, keep))


def partial_trace(matrix: np.ndarray, keep: int) -> np.ndarray:
    """
    Trace a 4 x 4 two-qubit matrix down to one qubit.

    Args:
        matrix: The two-qubit operator
        keep: 0 to keep qubit A, 1 to keep qubit B

    Returns:
        The 2 x 2 reduced operator
    """
    tensor = np.asarray(matrix).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ijkj->ik", tensor)
    if keep == 1:
        return np.einsum("ijil->jl", tensor)
    raise ValidationError("keep must be 0 or 1", f"keep = {keep}")


def clip_density_matrix(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Remove numerical negativity from a density matrix.

    Eigenvalues in [-1e-10, 0) are set to zero and the spectrum is rescaled to
    unit trace.

    Args:
        matrix: Hermitian unit-trace matrix

    Returns:
        The clipped eigenvalues and the reassembled matrix

    Raises:
        ValidationError: If an eigenvalue is below -1e-10
    """
    hermitian = 0.5 * (matrix + np.conj(matrix).T)
    eigenvalues, eigenvectors = np.linalg.eigh(hermitian)
    if eigenvalues[0] < -ToleranceConstants.POSITIVITY:
        raise ValidationError(
            "Density matrix is not positive semidefinite",
            f"Minimum eigenvalue: {eigenvalues[0]:.3e}",
        )
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    eigenvalues = eigenvalues / eigenvalues.sum()
    return eigenvalues, (eigenvectors * eigenvalues) @ eigenvectors.conj().T


def _require_qubits(n_qubits: int, minimum: int) -> None:
    if n_qubits < minimum:
        raise ValidationError(
            f"At least {minimum} qubits are required", f"N = {n_qubits}"
        )


def dicke_split_coefficients(n_qubits: int, excitations: int) -> List[Tuple[int, float]]:
    """
    Weights of the two-qubit / (N-2)-qubit bipartition of |D_N^excitations>.

    Args:
        n_qubits: Total number of qubits N >= 2
        excitations: Number of up spins, 0 <= excitations <= N

    Returns:
        [(q, weight)] for q = 0, 1, 2, weights summing to one

    Raises:
        ValidationError: If N < 2 or excitations is out of range
    """
    _require_qubits(n_qubits, 2)
    if not 0 <= excitations <= n_qubits:
        raise ValidationError(
            "Excitation number out of range", f"N = {n_qubits}, excitations = {excitations}"
        )
    return [
        (q, ExactMathHelper.to_float(ExactMathHelper.dicke_split_weight(n_qubits, excitations, q)))
        for q in range(3)
    ]


@lru_cache(maxsize=64)
def dicke_weight_table(n_qubits: int) -> np.ndarray:
    """
    Square roots of the bipartition weights for every excitation number.

    Uses the closed forms
    w_0 = (N-k)(N-k-1)/(N(N-1)), w_1 = 2k(N-k)/(N(N-1)), w_2 = k(k-1)/(N(N-1)).

    Args:
        n_qubits: Total number of qubits N >= 2

    Returns:
        Array of shape (N+1, 3) indexed [kappa, q]
    """
    _require_qubits(n_qubits, 2)
    kappa = np.arange(n_qubits + 1, dtype=float)
    n = float(n_qubits)
    denominator = n * (n - 1)
    weights = np.column_stack(
        [
            (n - kappa) * (n - kappa - 1) / denominator,
            2 * kappa * (n - kappa) / denominator,
            kappa * (kappa - 1) / denominator,
        ]
    )
    return LinearAlgebraHelper.read_only(np.sqrt(np.clip(weights, 0.0, None)))


def two_qubit_rdm(state: SymmetricState) -> TwoQubitDensityMatrix:
    """
    Reduced density matrix of any two qubits of a symmetric N-qubit state.

    Args:
        state: State of the top with N = 2j >= 2

    Returns:
        The two-qubit reduced state

    Raises:
        ValidationError: If N < 2
    """
    n_qubits = state.spin.n_qubits
    _require_qubits(n_qubits, 2)
    amplitudes = state.amplitudes_by_excitation
    roots = dicke_weight_table(n_qubits)

    # environment vectors v_q[kappa'] = a_{kappa'+q} sqrt(w_q(kappa'+q)), kappa' = 0..N-2
    environment = np.stack(
        [
            amplitudes[q : q + n_qubits - 1] * roots[q : q + n_qubits - 1, q]
            for q in (2, 1, 0)
        ]
    )
    pair_block = environment @ environment.conj().T
    matrix = _PAIR_DICKE_BASIS @ pair_block @ _PAIR_DICKE_BASIS.conj().T
    return TwoQubitDensityMatrix(0.5 * (matrix + matrix.conj().T))


def one_qubit_rdm(state: SymmetricState) -> OneQubitDensityMatrix:
    """
    Reduced density matrix of a single qubit, from collective expectation values.

    rho_1 = [[ (1 + <S_z>/j)/2, <S_->/(2j) ], [ <S_+>/(2j), (1 - <S_z>/j)/2 ]].

    Args:
        state: State of the top with N = 2j >= 1

    Returns:
        The one-qubit reduced state
    """
    spin = state.spin
    psi = state.amplitudes
    sz = float(np.dot(spin.m_values, np.abs(psi) ** 2))
    sminus = complex(np.vdot(psi, static_operators(spin).jminus @ psi))
    j = spin.j
    matrix = np.array(
        [
            [0.5 * (1 + sz / j), sminus / (2 * j)],
            [np.conj(sminus) / (2 * j), 0.5 * (1 - sz / j)],
        ],
        dtype=complex,
    )
    return OneQubitDensityMatrix(matrix)


def expand_to_qubits(state: SymmetricState) -> np.ndarray:
    """
    Write a symmetric state in the full 2^N product basis.

    Qubit 0 is the most significant bit and bit value 0 means spin up. Each
    bitstring with kappa up spins gets amplitude a_kappa / sqrt(C(N, kappa)).

    Raises:
        ValidationError: If N exceeds the brute-force limit
    """
    n_qubits = state.spin.n_qubits
    if n_qubits > BRUTE_FORCE_MAX_QUBITS:
        raise ValidationError(
            "Too many qubits for the product-basis expansion",
            f"N = {n_qubits}, limit {BRUTE_FORCE_MAX_QUBITS}",
        )
    indices = np.arange(2**n_qubits)
    down_counts = ((indices[:, None] >> np.arange(n_qubits)) & 1).sum(axis=1)
    up_counts = n_qubits - down_counts
    amplitudes = state.amplitudes_by_excitation[up_counts]
    return amplitudes / np.sqrt(comb(n_qubits, up_counts))


def brute_force_rdm_oracle(
    state: SymmetricState,
) -> Tuple[OneQubitDensityMatrix, TwoQubitDensityMatrix]:
    """
    Reduced states by literal partial trace of the product-basis expansion.

    Args:
        state: State of the top with 2 <= N <= 14

    Returns:
        (one-qubit reduced state of qubit 0, two-qubit reduced state of qubits 0, 1)
    """
    _require_qubits(state.spin.n_qubits, 2)
    vector = expand_to_qubits(state)
    n_qubits = state.spin.n_qubits

    pair = vector.reshape(4, 2 ** (n_qubits - 2))
    rho_pair = pair @ pair.conj().T
    single = vector.reshape(2, 2 ** (n_qubits - 1))
    rho_single = single @ single.conj().T
    return OneQubitDensityMatrix(rho_single), TwoQubitDensityMatrix(rho_pair)
