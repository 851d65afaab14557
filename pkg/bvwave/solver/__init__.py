""" Semi-smooth Newton, path following and run diagnostics """

from bvwave.solver.newton import (
    ActiveSets,
    apply_DF,
    dense_condition_number,
    dense_newton_matrix,
    krylov_solve,
    newton_operator,
    semismooth_newton,
    value_function_derivative,
)
from bvwave.solver.path import path_following, schedule
from bvwave.solver.diagnostics import JumpCluster, diagnostics, jump_clusters
