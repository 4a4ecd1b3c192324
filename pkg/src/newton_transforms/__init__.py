"""Damped Newton under monotone loss transformations.

Evaluate transformed losses by the chain rule, convert stepsize schedules
across transformations via the scaling factor, convexify and star-convexify
pseudoconvex losses, and reproduce the desk-scale experiments (iterate
equivalence, sign-flip regions, convergence neighborhoods, convergence radii).
"""

from .errors import (
    CapabilityError,
    DomainError,
    EvaluationError,
    InputError,
    SingularScalingError,
)
from .linalg import DualNormResult, dual_norm_sq, min_eigenvalue, pinv_solve, principal_minors
from .losses import (
    RadialLoss,
    SmoothLoss,
    as_1d_loss,
    loss_from_spec,
    make_benchmark,
    make_counterexample,
    make_polynorm,
    make_polytope,
    make_polytope_instance,
    make_radial,
)
from .newton import (
    BacktrackingSchedule,
    ConstantSchedule,
    ForwardedSchedule,
    InducedSchedule,
    IterateTrace,
    NewtonConfig,
    lm_invariance_residual,
    lm_step,
    run_equivalence,
    run_newton,
)
from .transforms import (
    ScalarTransform,
    TransformedLoss,
    compose,
    forward_stepsize,
    induced_stepsize,
    make_table1,
    scaling_factor,
    transform_from_spec,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
