"""
Constants used throughout the kicked top toolkit.
"""

import math
from typing import Final, Tuple


class PackageConstants:
    """Package identity recorded in experiment manifests."""

    NAME: Final[str] = "kicked_top_correlations"
    VERSION: Final[str] = "1.0.0"


class ToleranceConstants:
    """Numerical tolerances shared by the physics modules."""

    UNITARITY: Final[float] = 1e-11
    NORM: Final[float] = 1e-10
    RENORMALIZE: Final[float] = 1e-12
    HERMITICITY: Final[float] = 1e-8
    TRACE: Final[float] = 1e-8
    POSITIVITY: Final[float] = 1e-10
    EIGENVALUE_FLOOR: Final[float] = 1e-14
    SPHERE: Final[float] = 1e-9
    POLE: Final[float] = 1e-8
    DISCORD_NOISE: Final[float] = 1e-9
    DISCORD_BOUND_SLACK: Final[float] = 1e-9
    PARITY_EIGENVALUE: Final[float] = 1e-6


class DiscordConstants:
    """Measurement minimisation settings for quantum discord."""

    GRID_THETA: Final[int] = 32
    GRID_PHI: Final[int] = 64
    REFINE_STARTS: Final[int] = 3
    REFINE_TOLERANCE: Final[float] = 1e-9
    REFINE_ANGLE_TOLERANCE: Final[float] = 1e-7


class ClassicalConstants:
    """Finite-difference and continuation settings for the classical map."""

    FINITE_DIFFERENCE_STEP: Final[float] = 1e-6
    STABILITY_MARGIN: Final[float] = 1e-6
    BISECTION_TOLERANCE: Final[float] = 1e-4
    NEWTON_TOLERANCE: Final[float] = 1e-10
    CYCLE_RESIDUAL: Final[float] = 1e-8
    NEWTON_MAX_ITERATIONS: Final[int] = 100


class PaperDefaults:
    """Default parameter sets of the published kicked top study."""

    P_SYMMETRIC: Final[float] = math.pi / 2
    P_GENERIC: Final[float] = 1.7
    THETA0: Final[float] = math.pi / 2
    PHI0: Final[float] = -math.pi / 2
    CHAOTIC_PROBE: Final[Tuple[float, float]] = (1.6707, -1.3707)
    CHAOTIC_K: Final[float] = 10.0
    TABLE_STEPS: Final[int] = 1000
    SCALING_STEPS: Final[int] = 500
    JUMP_FACTOR: Final[float] = 5.0
    JUMP_BASELINE_POINTS: Final[int] = 5
    J_GRID_MIN: Final[float] = 10.0
    J_GRID_MAX: Final[float] = 400.0
    J_GRID_POINTS: Final[int] = 20
    EIGVEC_K_MIN: Final[float] = 10.0
    EIGVEC_K_MAX: Final[float] = 1000.0


class OutputConstants:
    """Formatting of result files."""

    FLOAT_FORMAT: Final[str] = "%.12g"
    RESULTS_FILE: Final[str] = "results.csv"
    PLOT_FILE: Final[str] = "plot.csv"
    MANIFEST_FILE: Final[str] = "manifest.ini"
