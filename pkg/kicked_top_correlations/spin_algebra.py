"""
Angular-momentum algebra of a spin-j top in the |j,m> basis.

Basis vectors are ordered with m descending, so index 0 is |j,j> (all
qubits up) and index 2j is |j,-j>.
"""

import numbers
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import sympy as sp

from kicked_top_correlations.constants import ToleranceConstants
from kicked_top_correlations.errors import ValidationError
from kicked_top_correlations.utils import ExactMathHelper, LinearAlgebraHelper


@dataclass(frozen=True)
class SpinQuantumNumber:
    """
    Total spin j of the top, stored as the integer 2j.

    Attributes:
        twice_j: Twice the spin quantum number (equals the qubit count N)
    """

    twice_j: int

    def __post_init__(self) -> None:
        """
        Validate the spin.

        Raises:
            ValidationError: If 2j is not a positive integer
        """
        if isinstance(self.twice_j, bool) or not isinstance(
            self.twice_j, numbers.Integral
        ):
            raise ValidationError(
                "2j must be an integer", f"Provided 2j: {self.twice_j!r}"
            )
        if self.twice_j < 1:
            raise ValidationError(
                "2j must be at least 1", f"Provided 2j: {self.twice_j}"
            )
        object.__setattr__(self, "twice_j", int(self.twice_j))

    @classmethod
    def from_j(cls, j: float) -> "SpinQuantumNumber":
        """
        Build a spin from its (half-)integer value.

        Args:
            j: The spin quantum number, e.g. 0.5, 1, 50

        Returns:
            The corresponding SpinQuantumNumber

        Raises:
            ValidationError: If j is not a positive half-integer
        """
        twice = 2.0 * float(j)
        if not np.isfinite(twice) or abs(twice - round(twice)) > 1e-9:
            raise ValidationError("j must be a half-integer", f"Provided j: {j}")
        rounded = int(round(twice))
        return cls(rounded)

    @property
    def j(self) -> float:
        return self.twice_j / 2.0

    @property
    def exact_j(self) -> sp.Rational:
        return ExactMathHelper.half_integer(self.twice_j)

    @property
    def n_qubits(self) -> int:
        return self.twice_j

    @property
    def dimension(self) -> int:
        return self.twice_j + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_j % 2 == 0

    @property
    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers j, j-1, ..., -j."""
        return np.arange(self.twice_j, -self.twice_j - 1, -2) / 2.0

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_j // 2)
        return f"{self.twice_j}/2"


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """
    Dense angular-momentum operators and the two Floquet factors.

    Attributes:
        spin: The spin these operators act on
        p: Precession angle about y (radians)
        k: Kick strength (dimensionless)
        jz, jplus, jminus, jx, jy: Angular-momentum matrices
        rotation: exp(-i p J_y)
        torsion_diagonal: Diagonal of exp(-i (k/2j) J_z^2)
    """

    spin: SpinQuantumNumber
    p: float
    k: float
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    rotation: np.ndarray
    torsion_diagonal: np.ndarray

    @property
    def torsion(self) -> np.ndarray:
        """The torsion factor as a dense diagonal matrix."""
        return np.diag(self.torsion_diagonal)


@dataclass(frozen=True, eq=False)
class SymmetricState:
    """
    Pure state of the top, i.e. a permutation-symmetric state of N = 2j qubits.

    Attributes:
        spin: The spin of the top
        amplitudes: Complex amplitudes a_m for m = j, j-1, ..., -j
    """

    spin: SpinQuantumNumber
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        """
        Validate dimension and normalisation.

        Raises:
            ValidationError: If the amplitude vector has the wrong length or norm
        """
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != self.spin.dimension:
            raise ValidationError(
                "Amplitude vector does not match the spin dimension",
                f"Expected {self.spin.dimension}, got {amplitudes.shape[0]}",
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > ToleranceConstants.NORM:
            raise ValidationError(
                "State must be normalised", f"Squared norm: {norm!r}"
            )
        object.__setattr__(self, "amplitudes", LinearAlgebraHelper.read_only(amplitudes))

    @classmethod
    def from_amplitudes(
        cls, amplitudes: np.ndarray, normalize: bool = False
    ) -> "SymmetricState":
        """
        Build a state from a raw amplitude vector, inferring j from its length.

        Args:
            amplitudes: Amplitudes ordered m = j ... -j
            normalize: Rescale the vector to unit norm first

        Returns:
            The symmetric state
        """
        vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if vector.shape[0] < 2:
            raise ValidationError(
                "A spin state needs at least two amplitudes",
                f"Provided length: {vector.shape[0]}",
            )
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise ValidationError("Cannot normalise the zero vector")
            vector = vector / norm
        return cls(SpinQuantumNumber(vector.shape[0] - 1), vector)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def amplitudes_by_excitation(self) -> np.ndarray:
        """Amplitudes indexed by the number of up spins kappa = j + m."""
        return self.amplitudes[::-1]

    def expectation(self, operator: np.ndarray) -> complex:
        """
        Return <psi|O|psi> for a dense operator.

        Raises:
            ValidationError: If the operator dimension does not match
        """
        if operator.shape != (self.spin.dimension, self.spin.dimension):
            raise ValidationError(
                "Operator dimension does not match the state",
                f"Operator {operator.shape}, state dimension {self.spin.dimension}",
            )
        return complex(np.vdot(self.amplitudes, operator @ self.amplitudes))


@dataclass(frozen=True)
class CollectiveExpectations:
    """Expectation values of collective spin operators in one state."""

    sz: float
    sz2: float
    splus: complex
    sminus: complex
    splus2: complex
    sminus2: complex
    splus_sz: complex
    sz_splus: complex
    sminus_sz: complex
    sz_sminus: complex


@lru_cache(maxsize=64)
def _angular_momentum(twice_j: int) -> Tuple[np.ndarray, ...]:
    spin = SpinQuantumNumber(twice_j)
    m = spin.m_values
    j = spin.j

    # J_+ |j,m> = sqrt((j-m)(j+m+1)) |j,m+1>, and m+1 sits one index up
    jplus = np.zeros((spin.dimension, spin.dimension), dtype=complex)
    lower = m[1:]
    jplus[np.arange(spin.dimension - 1), np.arange(1, spin.dimension)] = np.sqrt(
        (j - lower) * (j + lower + 1)
    )
    jminus = jplus.conj().T.copy()
    jz = np.diag(m).astype(complex)
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    return tuple(
        LinearAlgebraHelper.read_only(matrix) for matrix in (jz, jplus, jminus, jx, jy)
    )


@lru_cache(maxsize=64)
def _jy_eigensystem(twice_j: int) -> Tuple[np.ndarray, np.ndarray]:
    jy = _angular_momentum(twice_j)[4]
    eigenvalues, eigenvectors = LinearAlgebraHelper.hermitian_eigensystem(jy)
    return (
        LinearAlgebraHelper.read_only(eigenvalues),
        LinearAlgebraHelper.read_only(eigenvectors),
    )


def _require_finite(name: str, value: float) -> float:
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite", f"Provided {name}: {value}")
    return float(value)


def rotation_operator(spin: SpinQuantumNumber, angle: float) -> np.ndarray:
    """
    Return exp(-i angle J_y), built from the cached eigendecomposition of J_y.

    Args:
        spin: The spin of the top
        angle: Rotation angle in radians

    Returns:
        The (2j+1) x (2j+1) rotation matrix
    """
    angle = _require_finite("angle", angle)
    eigenvalues, eigenvectors = _jy_eigensystem(spin.twice_j)
    return LinearAlgebraHelper.exponentiate(eigenvalues, eigenvectors, angle)


def build_operators(spin: SpinQuantumNumber, p: float, k: float) -> OperatorSet:
    """
    Construct J_z, J_+-, J_x, J_y and the rotation and torsion factors.

    Args:
        spin: The spin of the top
        p: Precession angle about y in radians
        k: Kick strength

    Returns:
        The immutable operator set

    Raises:
        ValidationError: If p or k is not finite
    """
    p = _require_finite("p", p)
    k = _require_finite("k", k)
    jz, jplus, jminus, jx, jy = _angular_momentum(spin.twice_j)
    torsion_diagonal = np.exp(-1j * (k / spin.twice_j) * spin.m_values**2)
    return OperatorSet(
        spin=spin,
        p=p,
        k=k,
        jz=jz,
        jplus=jplus,
        jminus=jminus,
        jx=jx,
        jy=jy,
        rotation=LinearAlgebraHelper.read_only(rotation_operator(spin, p)),
        torsion_diagonal=LinearAlgebraHelper.read_only(torsion_diagonal),
    )


@lru_cache(maxsize=64)
def static_operators(spin: SpinQuantumNumber) -> OperatorSet:
    """Operator set with p = k = 0, shared by callers needing only J matrices."""
    return build_operators(spin, 0.0, 0.0)


def coherent_state(spin: SpinQuantumNumber, theta0: float, phi0: float) -> SymmetricState:
    """
    Spin-coherent state pointing along (theta0, phi0).

    Computes exp(i theta0 (J_x sin phi0 - J_y cos phi0)) |j,j>. The generator is
    -exp(-i phi0 J_z) J_y exp(i phi0 J_z), so the state equals
    exp(i phi0 j) exp(-i phi0 J_z) exp(-i theta0 J_y) |j,j>, where the J_y rotation
    uses the exact eigendecomposition.

    Args:
        spin: The spin of the top
        theta0: Polar angle in [0, pi]
        phi0: Azimuth in (-pi, pi]

    Returns:
        The coherent state

    Raises:
        ValidationError: If an angle is outside its domain
    """
    theta0 = _require_finite("theta0", theta0)
    phi0 = _require_finite("phi0", phi0)
    if not (-1e-12 <= theta0 <= np.pi + 1e-12):
        raise ValidationError("theta0 must lie in [0, pi]", f"Provided theta0: {theta0}")
    if not (-np.pi - 1e-12 <= phi0 <= np.pi + 1e-12):
        raise ValidationError("phi0 must lie in (-pi, pi]", f"Provided phi0: {phi0}")

    eigenvalues, eigenvectors = _jy_eigensystem(spin.twice_j)
    # first column of exp(-i theta0 J_y)
    column = eigenvectors @ (
        np.exp(-1j * theta0 * eigenvalues) * eigenvectors[0, :].conj()
    )
    phases = np.exp(1j * phi0 * (spin.j - spin.m_values))
    amplitudes = phases * column
    return SymmetricState(spin, amplitudes / np.linalg.norm(amplitudes))


def basis_state(spin: SpinQuantumNumber, m: float) -> SymmetricState:
    """
    Return the Dicke state |j,m>.

    Raises:
        ValidationError: If m is not one of j, j-1, ..., -j
    """
    index = spin.j - float(m)
    rounded = int(round(index))
    if abs(index - rounded) > 1e-9 or not 0 <= rounded <= spin.twice_j:
        raise ValidationError("m is not a valid magnetic quantum number", f"m = {m}")
    amplitudes = np.zeros(spin.dimension, dtype=complex)
    amplitudes[rounded] = 1.0
    return SymmetricState(spin, amplitudes)


def random_state(
    spin: SpinQuantumNumber, rng: Optional[np.random.Generator] = None, real: bool = False
) -> SymmetricState:
    """
    Draw a uniformly random pure state of the top.

    Args:
        spin: The spin of the top
        rng: Random generator (a fresh default generator when omitted)
        real: Draw a real unit vector instead of a complex one

    Returns:
        The random state
    """
    rng = rng if rng is not None else np.random.default_rng()
    vector = rng.standard_normal(spin.dimension).astype(complex)
    if not real:
        vector = vector + 1j * rng.standard_normal(spin.dimension)
    return SymmetricState(spin, vector / np.linalg.norm(vector))


def collective_expectations(
    state: SymmetricState, ops: OperatorSet
) -> CollectiveExpectations:
    """
    Expectation values of S_z, S_z^2, S_+-, S_+-^2, S_+- S_z and S_z S_+-.

    Args:
        state: Normalised state of the top
        ops: Operators built for the same spin

    Returns:
        The collective expectation values

    Raises:
        ValidationError: If state and operators have different dimensions
    """
    if state.spin.dimension != ops.spin.dimension:
        raise ValidationError(
            "State and operators have different dimensions",
            f"State {state.spin.dimension}, operators {ops.spin.dimension}",
        )
    psi = state.amplitudes
    m = state.spin.m_values
    weights = np.abs(psi) ** 2

    plus_psi = ops.jplus @ psi
    minus_psi = ops.jminus @ psi
    z_psi = m * psi

    splus = complex(np.vdot(psi, plus_psi))
    return CollectiveExpectations(
        sz=float(np.dot(m, weights)),
        sz2=float(np.dot(m**2, weights)),
        splus=splus,
        sminus=splus.conjugate(),
        splus2=complex(np.vdot(psi, ops.jplus @ plus_psi)),
        sminus2=complex(np.vdot(psi, ops.jminus @ minus_psi)),
        splus_sz=complex(np.vdot(psi, ops.jplus @ z_psi)),
        sz_splus=complex(np.vdot(psi, m * plus_psi)),
        sminus_sz=complex(np.vdot(psi, ops.jminus @ z_psi)),
        sz_sminus=complex(np.vdot(psi, m * minus_psi)),
    )
