"""Alternative fixed-point iteration for nonexpansive maps and its coupling
to the Halpern iteration, on Euclidean space and the Poincare disk."""

from .errors import AltIterError, DomainError, ParameterError, ScheduleExhausted
from .geometry import (
    Ball, Box, Space, Violation, WholeSpace, combine, distance, euclidean, hyperbolic_disk,
    validate_point,
)
from .maps import (
    Average, Compose, EuclideanAffine, EuclideanRotation, EuclideanScaling, FixedPointWitness,
    HyperbolicRotation, ProjectionOntoDomain, apply, check_nonexpansive, fixed_point_oracle,
)
from .iterate import (
    Constant, CoupledTrajectory, Explicit, Harmonic, IterationConfig, LambdaSchedule, Power,
    iterate_alternative, iterate_coupled, iterate_halpern, verify_coupling,
)
from .rates import (
    ClosedFormRate, EpsilonGrid, RateTable, check_convergence_transfer, check_domination,
    check_rate, check_rate_transfer, distance_to_fixed_point_series, empirical_rate,
    step_distances,
)

__version__ = "0.1.0"
