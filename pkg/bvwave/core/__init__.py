""" Getting the shared types, errors and environment config"""
from bvwave.core._errors import (
    BVWaveError,
    ConfigError,
    KrylovError,
    PathFollowingError,
    SolverError,
    ValidationError,
)
from bvwave.core._env import EnvBase, EnvConfig
from bvwave.core._grid import Grid
from bvwave.core._fields import (
    DerivativeControl,
    ProblemData,
    ProblemMetadata,
    RegularizationParams,
    SpaceTimeField,
)
from bvwave.core._controls import (
    Atom,
    CantorPiece,
    DensityPiece,
    ExactComponent,
    ExactControl,
    evaluate_exact_control,
    pin_derivative,
    total_variation,
)
from bvwave.core._reports import CostBreakdown, Diagnostics, ManufacturedCheck, SolveReport
