""" BV-in-time optimal control of the wave equation by H1 path following"""
from bvwave.core import (
    BVWaveError as BVWaveError,
    ConfigError as ConfigError,
    KrylovError as KrylovError,
    PathFollowingError as PathFollowingError,
    SolverError as SolverError,
    ValidationError as ValidationError,
    DerivativeControl,
    ExactControl,
    Grid,
    ProblemData,
    RegularizationParams,
    SpaceTimeField,
)
from bvwave.helpers import ProblemKind, cantor_function, mollified_plateau
from bvwave.fem import FemOperators, assemble
from bvwave.control import (
    apply_B,
    apply_Bstar,
    apply_S,
    compute_adjoint_functional,
    cost_J,
    cost_Jgamma,
    gram_matrix,
    prox,
    residual_F,
)
from bvwave.solver import (
    ActiveSets,
    apply_DF,
    diagnostics,
    krylov_solve,
    path_following,
    semismooth_newton,
)
from bvwave.problems import (
    ManufacturedProblem,
    build_cantor_example,
    build_dirac_example,
    build_zero_problem,
    verify_manufactured,
)
from bvwave.metadata.__version__ import __version__

__all__ = [
    'BVWaveError',
    'ConfigError',
    'KrylovError',
    'PathFollowingError',
    'SolverError',
    'ValidationError',
    'DerivativeControl',
    'ExactControl',
    'Grid',
    'ProblemData',
    'RegularizationParams',
    'SpaceTimeField',
    'ProblemKind',
    'cantor_function',
    'mollified_plateau',
    'FemOperators',
    'assemble',
    'apply_B',
    'apply_Bstar',
    'apply_S',
    'compute_adjoint_functional',
    'cost_J',
    'cost_Jgamma',
    'gram_matrix',
    'prox',
    'residual_F',
    'ActiveSets',
    'apply_DF',
    'diagnostics',
    'krylov_solve',
    'path_following',
    'semismooth_newton',
    'ManufacturedProblem',
    'build_cantor_example',
    'build_dirac_example',
    'build_zero_problem',
    'verify_manufactured',
    '__version__',
]
