"""Dynamical and Selberg zeta functions for Schottky reflection groups.

Pipeline: a circle configuration (geometry) is reduced to boundary-line
matrices; admissible periodic words (symbolic) get per-orbit multipliers
(orbits) cached in a table; the truncated zeta function and its derivative
(zeta) feed the dimension solve, zero counting, and grid statistics
(analysis); an independent transfer-operator collocation (transfer) checks
the dimension through Bowen's equation.
"""

from .analysis import (
    DensityRow,
    DimensionResult,
    LogZRow,
    Rectangle,
    ZeroCount,
    count_zeros,
    density_grid,
    dimension,
    locate_zeros,
    logz_grid,
)
from .errors import (
    BracketFailure,
    CacheError,
    CayleyPoleInsideDisc,
    ConfigError,
    ContourNearZero,
    DisjointnessViolation,
    InvalidAngle,
    MaxIterations,
    NoConvergence,
    NonIntegerResult,
    NoSignChange,
    NotContracting,
    OrthogonalityViolation,
    SzetaError,
    ZeroDenominator,
)
from .geometry import (
    BoundaryInterval,
    BoundaryMap,
    Circle,
    GroupConfig,
    build_symmetric,
    generator_matrices,
    group_from_circles,
    to_boundary_maps,
    validate,
)
from .orbits import (
    OrbitScalars,
    OrbitTable,
    build_orbit_table,
    load_table,
    multiplier,
    multiplier_analytic,
    save_table,
)
from .symbolic import (
    OrbitClass,
    Word,
    canonical_rotation,
    enumerate_orbit_classes,
    is_admissible,
    primitive_decomposition,
    word_count,
)
from .transfer import (
    BowenResult,
    CollocationOperator,
    bowen_dimension,
    build_collocation,
    eigenfunction_values,
    geometric_decay_fit,
    leading_eigenvalue,
    operator_determinant,
    singular_value_profile,
)
from .zeta import (
    ErrorMetric,
    ZetaSeries,
    ZetaValue,
    error_metric,
    evaluate_exp_oracle,
    evaluate_pr_oracle,
)

__version__ = "0.1.0"

MAX_TRUNCATION = 20
