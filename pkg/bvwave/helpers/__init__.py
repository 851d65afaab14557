""" Helpers for quadrature, Cantor profiles and enums used across the package """

from bvwave.helpers.tool_kit import CustomProblem, Orientation, ProblemKind
from bvwave.helpers.quadrature import (
    cumulative_trapezoid,
    cumulative_trapezoid_adjoint,
    integrate,
    l2_norm,
    trapezoid_weights,
)
from bvwave.helpers.cantor import (
    bump,
    bump_dx,
    bump_dxx,
    cantor_function,
    check_plateaus,
    mollified_plateau,
    mollified_plateau_dt,
    mollifier,
    smooth_step,
)
