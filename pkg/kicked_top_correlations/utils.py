"""
Utility functions for the kicked top toolkit.
"""

import re
from typing import Tuple

import numpy as np
import scipy.linalg as la
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr

from kicked_top_correlations.errors import ValidationError

_ALLOWED_NAMES = {"pi": sp.pi, "sqrt": sp.sqrt, "E": sp.E}
_IDENTIFIER = re.compile(r"[A-Za-z_]+")
_SAFE_CHARACTERS = re.compile(r"^[0-9A-Za-z_+\-*/().\s]*$")


class ExactMathHelper:
    """Helper class for exact (rational) arithmetic with sympy."""

    @staticmethod
    def half_integer(twice_value: int) -> sp.Rational:
        """
        Return the exact rational twice_value / 2.

        Args:
            twice_value: Twice the half-integer

        Returns:
            The half-integer as a sympy Rational
        """
        return sp.Rational(twice_value, 2)

    @staticmethod
    def dicke_split_weight(n_qubits: int, excitations: int, q: int) -> sp.Rational:
        """
        Weight of the |D_2^q> (x) |D_{N-2}^{excitations-q}> term of a Dicke state.

        Args:
            n_qubits: Total number of qubits N
            excitations: Number of up spins in the Dicke state
            q: Number of up spins carried by the two kept qubits

        Returns:
            C(2,q) C(N-2, excitations-q) / C(N, excitations), zero when infeasible
        """
        env = excitations - q
        if env < 0 or env > n_qubits - 2:
            return sp.Integer(0)
        return (
            sp.binomial(2, q)
            * sp.binomial(n_qubits - 2, env)
            / sp.binomial(n_qubits, excitations)
        )

    @staticmethod
    def to_float(expression: sp.Expr) -> float:
        """
        Evaluate an exact expression to a Python float.

        Args:
            expression: The sympy expression to evaluate

        Returns:
            The numerical value
        """
        return float(sp.N(expression, 30))

    @staticmethod
    def parse_real(text: str) -> float:
        """
        Parse a real number written as a literal or a simple symbolic expression.

        Accepts forms such as ``1.7``, ``pi/2`` or ``sqrt(2)*pi``. Only the names
        ``pi``, ``sqrt`` and ``E`` are recognised.

        Args:
            text: The textual value

        Returns:
            The parsed value as a float

        Raises:
            ValidationError: If the text is not a finite real number
        """
        stripped = text.strip()
        try:
            return float(stripped)
        except ValueError:
            pass

        unknown = [
            name
            for name in _IDENTIFIER.findall(stripped)
            if name not in _ALLOWED_NAMES and not re.fullmatch(r"[eE]", name)
        ]
        if not stripped or unknown or not _SAFE_CHARACTERS.match(stripped):
            raise ValidationError(
                "Not a real number", f"Provided value: {text!r}"
            )

        try:
            expression = parse_expr(stripped, local_dict=dict(_ALLOWED_NAMES))
        except (SyntaxError, TypeError, sp.SympifyError) as e:
            raise ValidationError("Not a real number", f"{text!r}: {e}")

        if not expression.is_number or not expression.is_real:
            raise ValidationError("Not a real number", f"Provided value: {text!r}")
        value = ExactMathHelper.to_float(expression)
        if not np.isfinite(value):
            raise ValidationError("Value must be finite", f"Provided value: {text!r}")
        return value


class LinearAlgebraHelper:
    """Helper class for the dense linear algebra used by the physics modules."""

    @staticmethod
    def max_norm(matrix: np.ndarray) -> float:
        """Return the largest absolute entry of a matrix."""
        return float(np.max(np.abs(matrix))) if matrix.size else 0.0

    @staticmethod
    def unitarity_residual(matrix: np.ndarray) -> float:
        """Return ||M^dagger M - I||_max."""
        identity = np.eye(matrix.shape[0])
        return LinearAlgebraHelper.max_norm(matrix.conj().T @ matrix - identity)

    @staticmethod
    def hermitian_eigensystem(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Diagonalise a Hermitian matrix.

        Args:
            matrix: The Hermitian matrix

        Returns:
            Ascending eigenvalues and the matching orthonormal eigenvectors (columns)
        """
        eigenvalues, eigenvectors = la.eigh(matrix)
        return eigenvalues, eigenvectors

    @staticmethod
    def exponentiate(
        eigenvalues: np.ndarray, eigenvectors: np.ndarray, angle: float
    ) -> np.ndarray:
        """
        Build exp(-i angle H) from the eigensystem of a Hermitian H.

        Args:
            eigenvalues: Eigenvalues of H
            eigenvectors: Orthonormal eigenvectors of H (columns)
            angle: The rotation angle

        Returns:
            The unitary matrix exp(-i angle H)
        """
        phases = np.exp(-1j * angle * eigenvalues)
        return (eigenvectors * phases) @ eigenvectors.conj().T

    @staticmethod
    def read_only(array: np.ndarray) -> np.ndarray:
        """Mark an array as immutable so that it can be shared from a cache."""
        array.setflags(write=False)
        return array
