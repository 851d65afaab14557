""" Control-to-state operators, prox and cost functionals """

from bvwave.control.operators import (
    AdjointFunctional,
    adjoint_from_state,
    apply_B,
    apply_Bstar,
    apply_S,
    compute_adjoint_functional,
    control_values,
    cost_breakdown,
    cost_J,
    cost_Jgamma,
    forcing_from_values,
    gram_matrix,
    prox,
    residual_F,
    residual_norm,
    smooth_gradient,
    state_from_values,
)
