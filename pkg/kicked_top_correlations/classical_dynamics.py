"""
Classical kicked top: map iteration, phase portraits and stability of periodic orbits.

Linearisations are taken in the canonical chart (z = cos theta, phi). The map
preserves the area element dz dphi, so Jacobians there have unit determinant,
and the eigenvalues of a monodromy matrix do not depend on the chart.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from kicked_top_correlations.constants import (
    ClassicalConstants,
    OutputConstants,
    ToleranceConstants,
)
from kicked_top_correlations.errors import CalculationError, ValidationError

logger = logging.getLogger(__name__)


def wrap_angle(phi: float) -> float:
    """Wrap an azimuth to (-pi, pi]."""
    wrapped = math.remainder(phi, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True)
class ClassicalPoint:
    """
    Point on the classical unit sphere.

    Attributes:
        x, y, z: Cartesian coordinates with x^2 + y^2 + z^2 = 1
    """

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        """
        Validate that the point lies on the unit sphere.

        Raises:
            ValidationError: If the radius differs from 1 by more than 1e-9
        """
        radius = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if not math.isfinite(radius) or abs(radius - 1.0) > ToleranceConstants.SPHERE:
            raise ValidationError(
                "Point must lie on the unit sphere",
                f"(X, Y, Z) = ({self.x}, {self.y}, {self.z}), radius {radius}",
            )

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "ClassicalPoint":
        """Build the point X = sin(theta)cos(phi), Y = sin(theta)sin(phi), Z = cos(theta)."""
        return cls(
            math.sin(theta) * math.cos(phi),
            math.sin(theta) * math.sin(phi),
            math.cos(theta),
        )

    @classmethod
    def from_canonical(cls, z: float, phi: float) -> "ClassicalPoint":
        """Build the point from the canonical coordinates (z, phi)."""
        z = min(1.0, max(-1.0, z))
        rho = math.sqrt(max(0.0, 1.0 - z * z))
        return cls(rho * math.cos(phi), rho * math.sin(phi), z)

    @property
    def theta(self) -> float:
        return math.acos(min(1.0, max(-1.0, self.z)))

    @property
    def phi(self) -> float:
        return wrap_angle(math.atan2(self.y, self.x))

    @property
    def sin_theta(self) -> float:
        return math.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def distance_to(self, other: "ClassicalPoint") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))


@dataclass(frozen=True)
class OrbitRecord:
    """
    Orbit of the classical map.

    Attributes:
        points: Seed followed by its successive images
        k: Kick strength
        p: Precession angle
    """

    points: Tuple[ClassicalPoint, ...]
    k: float
    p: float


class SeedLayout(str, Enum):
    """Placement of initial conditions in a phase portrait."""

    GRID = "grid"
    RANDOM = "random"


def map_step(pt: ClassicalPoint, k: float, p: float) -> ClassicalPoint:
    """
    Apply one period of the classical kicked top map.

    Args:
        pt: Point on the unit sphere
        k: Kick strength
        p: Precession angle

    Returns:
        The image point, renormalised to the sphere
    """
    cos_p, sin_p = math.cos(p), math.sin(p)
    rotated_x = pt.x * cos_p + pt.z * sin_p
    rotated_z = pt.z * cos_p - pt.x * sin_p
    twist = k * rotated_z
    cos_t, sin_t = math.cos(twist), math.sin(twist)

    x_new = rotated_x * cos_t - pt.y * sin_t
    y_new = rotated_x * sin_t + pt.y * cos_t
    z_new = rotated_z
    radius = math.sqrt(x_new**2 + y_new**2 + z_new**2)
    return ClassicalPoint(x_new / radius, y_new / radius, z_new / radius)


def iterate(pt: ClassicalPoint, n: int, k: float, p: float) -> ClassicalPoint:
    """Apply map_step n times."""
    for _ in range(n):
        pt = map_step(pt, k, p)
    return pt


def _seed_points(
    n_seeds: int, layout: SeedLayout, rng_seed: int
) -> List[ClassicalPoint]:
    if layout is SeedLayout.RANDOM:
        rng = np.random.default_rng(rng_seed)
        z_values = rng.uniform(-1.0, 1.0, n_seeds)
        phi_values = rng.uniform(-math.pi, math.pi, n_seeds)
        return [
            ClassicalPoint.from_canonical(float(z), float(phi))
            for z, phi in zip(z_values, phi_values)
        ]

    rows = max(1, int(round(math.sqrt(n_seeds / 2.0))))
    columns = int(math.ceil(n_seeds / rows))
    seeds = []
    for index in range(n_seeds):
        row, column = divmod(index, columns)
        theta = (row + 0.5) * math.pi / rows
        phi = -math.pi + (column + 0.5) * 2 * math.pi / columns
        seeds.append(ClassicalPoint.from_angles(theta, phi))
    return seeds


def phase_portrait(
    k: float,
    p: float,
    n_seeds: int,
    n_steps: int,
    seed_layout: Union[SeedLayout, str] = SeedLayout.GRID,
    rng_seed: int = 0,
    extra_seeds: Sequence[ClassicalPoint] = (),
) -> List[OrbitRecord]:
    """
    Iterate a family of initial conditions to draw a phase portrait.

    Args:
        k: Kick strength
        p: Precession angle
        n_seeds: Number of laid-out initial conditions
        n_steps: Map iterations per orbit (0 keeps only the seeds)
        seed_layout: 'grid' for a regular theta-phi grid, 'random' for uniform points
        rng_seed: Seed of the random layout
        extra_seeds: Additional initial conditions appended after the laid-out ones

    Returns:
        One OrbitRecord per seed, ordered by seed index

    Raises:
        ValidationError: If n_seeds < 1 or n_steps < 0
    """
    if n_seeds < 1:
        raise ValidationError("n_seeds must be at least 1", f"n_seeds = {n_seeds}")
    if n_steps < 0:
        raise ValidationError("n_steps must be non-negative", f"n_steps = {n_steps}")
    layout = SeedLayout(seed_layout)

    orbits = []
    for seed in _seed_points(n_seeds, layout, rng_seed) + list(extra_seeds):
        points = [seed]
        for _ in range(n_steps):
            points.append(map_step(points[-1], k, p))
        orbits.append(OrbitRecord(points=tuple(points), k=k, p=p))
    logger.debug("Computed %d orbits of %d steps at k=%g p=%g", len(orbits), n_steps, k, p)
    return orbits


def portrait_frame(orbits: Sequence[OrbitRecord]) -> pd.DataFrame:
    """Flatten orbits into rows of (orbit_id, step, theta, phi)."""
    rows = [
        (orbit_id, step, point.theta, point.phi)
        for orbit_id, orbit in enumerate(orbits)
        for step, point in enumerate(orbit.points)
    ]
    return pd.DataFrame(rows, columns=["orbit_id", "step", "theta", "phi"])


def write_portrait_csv(orbits: Sequence[OrbitRecord], path: Union[str, Path]) -> Path:
    """Write orbits as CSV with header orbit_id,step,theta,phi."""
    path = Path(path)
    portrait_frame(orbits).to_csv(
        path, index=False, float_format=OutputConstants.FLOAT_FORMAT
    )
    return path


def _canonical_image(z: float, phi: float, k: float, p: float) -> Tuple[float, float]:
    image = map_step(ClassicalPoint.from_canonical(z, phi), k, p)
    return image.z, image.phi


def jacobian(pt: ClassicalPoint, k: float, p: float) -> np.ndarray:
    """
    Jacobian of the map in the canonical chart (z = cos theta, phi).

    Central finite differences with step h = 1e-6; azimuth differences are
    wrapped to (-pi, pi].

    Args:
        pt: Point on the sphere away from the poles
        k: Kick strength
        p: Precession angle

    Returns:
        The 2 x 2 matrix d(z', phi') / d(z, phi)

    Raises:
        CalculationError: If the point or its image is at a pole (sin theta <= 1e-8)
    """
    if pt.sin_theta <= ToleranceConstants.POLE:
        raise CalculationError(
            "Polar singularity of the (theta, phi) chart",
            f"sin(theta) = {pt.sin_theta}",
        )
    if map_step(pt, k, p).sin_theta <= ToleranceConstants.POLE:
        raise CalculationError(
            "Image of the point lies at a pole", f"point ({pt.theta}, {pt.phi})"
        )

    h = ClassicalConstants.FINITE_DIFFERENCE_STEP
    z, phi = pt.z, pt.phi
    if abs(z) + h >= 1.0:
        raise CalculationError("Point too close to a pole for finite differences")

    z_plus, phi_plus = _canonical_image(z + h, phi, k, p)
    z_minus, phi_minus = _canonical_image(z - h, phi, k, p)
    dz_column = np.array([z_plus - z_minus, wrap_angle(phi_plus - phi_minus)]) / (2 * h)

    z_plus, phi_plus = _canonical_image(z, phi + h, k, p)
    z_minus, phi_minus = _canonical_image(z, phi - h, k, p)
    dphi_column = np.array([z_plus - z_minus, wrap_angle(phi_plus - phi_minus)]) / (2 * h)

    return np.column_stack([dz_column, dphi_column])


def monodromy(pt: ClassicalPoint, period: int, k: float, p: float) -> np.ndarray:
    """
    Monodromy matrix of the period-th iterate, as the chain-rule product of Jacobians.

    Args:
        pt: Starting point of the orbit
        period: Number of map applications
        k: Kick strength
        p: Precession angle

    Returns:
        The 2 x 2 monodromy matrix in the canonical chart
    """
    if period < 1:
        raise ValidationError("period must be at least 1", f"period = {period}")
    matrix = np.eye(2)
    current = pt
    for _ in range(period):
        matrix = jacobian(current, k, p) @ matrix
        current = map_step(current, k, p)
    return matrix


def max_multiplier(pt: ClassicalPoint, period: int, k: float, p: float) -> float:
    """Largest eigenvalue modulus of the monodromy matrix."""
    return float(np.max(np.abs(np.linalg.eigvals(monodromy(pt, period, k, p)))))


def _cycle_residual(pt: ClassicalPoint, period: int, k: float, p: float) -> np.ndarray:
    image = iterate(pt, period, k, p)
    return np.array([image.z - pt.z, wrap_angle(image.phi - pt.phi)])


def locate_cycle(
    seed: ClassicalPoint,
    period: int,
    k: float,
    p: float,
    tolerance: float = ClassicalConstants.NEWTON_TOLERANCE,
) -> ClassicalPoint:
    """
    Refine a point of a period-`period` cycle by damped Newton iteration.

    The residual F^period(u) - u is measured in the canonical chart and the
    Newton matrix is monodromy - I. Steps are halved until the residual
    decreases, which keeps the iteration on the cycle nearest to the seed.

    Args:
        seed: Initial guess
        period: Cycle period
        k: Kick strength
        p: Precession angle
        tolerance: Target max-norm of the residual

    Returns:
        The refined cycle point

    Raises:
        CalculationError: If Newton iteration does not converge
    """
    current = seed
    residual = _cycle_residual(current, period, k, p)
    for _ in range(ClassicalConstants.NEWTON_MAX_ITERATIONS):
        size = float(np.max(np.abs(residual)))
        if size <= tolerance:
            return current

        newton_matrix = monodromy(current, period, k, p) - np.eye(2)
        step = -np.linalg.lstsq(newton_matrix, residual, rcond=None)[0]

        damping = 1.0
        while damping > 1e-6:
            candidate = ClassicalPoint.from_canonical(
                current.z + damping * step[0], current.phi + damping * step[1]
            )
            candidate_residual = _cycle_residual(candidate, period, k, p)
            if np.max(np.abs(candidate_residual)) < size:
                current, residual = candidate, candidate_residual
                break
            damping /= 2
        else:
            break

    if np.max(np.abs(residual)) <= tolerance:
        return current
    raise CalculationError(
        "Newton iteration did not converge to a periodic orbit",
        f"period {period}, k = {k}, p = {p}, residual {np.max(np.abs(residual)):.3e}",
    )


def trivial_fixed_point_thresholds(p: float) -> Tuple[float, float]:
    """
    Kick strengths at which the trivial fixed points lose stability.

    The linearisation at (0, -1, 0) has trace 2 cos p - k sin p, and the one
    at (0, 1, 0) has trace 2 cos p + k sin p; stability is lost when the trace
    reaches -2 and +2 respectively. At p = 1.7 the second value is
    2 tan(0.85) = 2.277, the threshold usually quoted as about 2.2 for that
    precession angle.

    Args:
        p: Precession angle in (0, pi)

    Returns:
        (k at (theta, phi) = (pi/2, -pi/2), k at (pi/2, pi/2))
    """
    if not 0 < p < math.pi:
        raise ValidationError("p must lie in (0, pi)", f"p = {p}")
    half = p / 2
    return 2 / math.tan(half), 2 * math.tan(half)


def stability_scan(
    cycle_point: ClassicalPoint,
    period: int,
    p: float,
    k_range: Tuple[float, float],
    dk: float,
) -> float:
    """
    Find the kick strength at which a periodic orbit loses stability.

    The cycle is followed by continuation: at every k on the grid it is
    re-located by Newton iteration seeded from the previous location and
    verified to a residual of 1e-8. The first k whose largest multiplier
    modulus exceeds 1 + 1e-6 is then refined by bisection to |dk| < 1e-4.

    Args:
        cycle_point: A point of the cycle at (or near) the start of k_range
        period: Cycle period
        p: Precession angle
        k_range: (k_min, k_max) scan interval
        dk: Grid step of the coarse scan

    Returns:
        The bifurcation kick strength k_b

    Raises:
        ValidationError: If the range or step is invalid
        CalculationError: If no stability loss occurs in range or the cycle is lost
    """
    k_min, k_max = k_range
    if not k_min < k_max:
        raise ValidationError("k_range must be increasing", f"k_range = {k_range}")
    if dk <= 0:
        raise ValidationError("dk must be positive", f"dk = {dk}")
    threshold = 1.0 + ClassicalConstants.STABILITY_MARGIN

    def follow(seed: ClassicalPoint, k: float) -> Tuple[ClassicalPoint, float]:
        point = locate_cycle(seed, period, k, p)
        residual = float(np.max(np.abs(_cycle_residual(point, period, k, p))))
        if residual > ClassicalConstants.CYCLE_RESIDUAL:
            raise CalculationError(
                "Lost the periodic orbit during continuation",
                f"k = {k}, residual {residual:.3e}",
            )
        return point, max_multiplier(point, period, k, p)

    n_steps = int(math.ceil((k_max - k_min) / dk))
    previous_k: Optional[float] = None
    previous_point = cycle_point
    for index in range(n_steps + 1):
        k = min(k_min + index * dk, k_max)
        point, modulus = follow(previous_point, k)
        if modulus > threshold:
            if previous_k is None:
                raise CalculationError(
                    "Orbit is already unstable at the start of the range",
                    f"k = {k}, |lambda| = {modulus}",
                )
            stable_k, unstable_k, stable_point = previous_k, k, previous_point
            while unstable_k - stable_k >= ClassicalConstants.BISECTION_TOLERANCE:
                middle = 0.5 * (stable_k + unstable_k)
                middle_point, middle_modulus = follow(stable_point, middle)
                if middle_modulus > threshold:
                    unstable_k = middle
                else:
                    stable_k, stable_point = middle, middle_point
            k_b = 0.5 * (stable_k + unstable_k)
            logger.info("Period-%d orbit loses stability at k = %.6f (p = %g)", period, k_b, p)
            return k_b
        previous_k, previous_point = k, point

    raise CalculationError(
        "No stability loss in range", f"k_range = {k_range}, period {period}, p = {p}"
    )
