""" Analytically solvable test problems """

from bvwave.problems.manufactured import (
    ManufacturedProblem,
    box_indicator,
    build_discrete_manufactured,
    build_manufactured,
    build_zero_problem,
    check_manufactured,
    complementarity_gap,
    empirical_orders,
    verify_manufactured,
)
from bvwave.problems.dirac import (
    build_dirac_example,
    dirac_adjoint,
    dirac_atoms,
    dirac_beta,
    dirac_exact_cost,
)
from bvwave.problems.cantor import build_cantor_example, shape_moment
