"""
Devil's staircase example: the optimal control rises by a Cantor staircase inside a
plateau where psi = -alpha and falls by a mirrored staircase inside a plateau where
psi = +alpha. Default configuration: Omega = [-2, 2]^2, T = 5.
"""

import logging
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from bvwave.core import (
    CantorPiece,
    DerivativeControl,
    ExactComponent,
    ExactControl,
    Grid,
    ProblemMetadata,
    ValidationError,
    pin_derivative,
)
from bvwave.helpers import (
    Orientation,
    bump,
    bump_dxx,
    check_plateaus,
    mollified_plateau,
    mollified_plateau_dt,
)
from bvwave.problems.manufactured import (
    ManufacturedProblem,
    box_indicator,
    build_discrete_manufactured,
    build_manufactured,
)


logger = logging.getLogger(__name__)

CANTOR_T = 5.0
CANTOR_BOUNDS = (-2.0, 2.0)
DEFAULT_EPS = 0.28
DEFAULT_PLATEAUS: Tuple[Tuple[float, float, float], ...] = ((0.5, 2.0, 1.0), (3.0, 4.5, -1.0))
DEFAULT_G_SCALE = 10.0
DEFAULT_PIECES: Tuple[CantorPiece, ...] = (
    CantorPiece(0.8, 2.14, 10.0, Orientation.RISING, 0.5),
    CantorPiece(2.85, 4.2, 10.0, Orientation.FALLING, 0.5),
)
_SUPPORT_HALF_WIDTH = 0.5


@lru_cache(maxsize=None)
def _bump_integral(half_width: float) -> float:
    value, _ = quad(lambda x: float(bump(x)), -half_width, half_width, epsabs=1e-13, epsrel=1e-12)
    return value


def shape_moment(d: int, g_scale: float = DEFAULT_G_SCALE) -> float:
    """z = int f g dx with f the product bump and g = g_scale * indicator of [-1/2, 1/2]^d"""
    return g_scale * _bump_integral(_SUPPORT_HALF_WIDTH) ** d


def _check_grid(grid: Grid, plateaus: Sequence[Tuple[float, float, float]], eps: float) -> None:
    if any(lo > -1.0 or hi < 1.0 for lo, hi in zip(grid.space_lo, grid.space_hi)):
        error_message = f"The box must contain [-1, 1]^{grid.dim}, got lo={grid.space_lo}, hi={grid.space_hi}"
        logger.error(error_message)
        raise ValidationError(error_message)
    check_plateaus(plateaus, eps, grid.T)


def build_cantor_example(
        grid: Grid,
        eps: float = DEFAULT_EPS,
        plateaus: Sequence[Tuple[float, float, float]] = DEFAULT_PLATEAUS,
        g_scale: float = DEFAULT_G_SCALE,
        pieces: Sequence[CantorPiece] = DEFAULT_PIECES,
        discrete: bool = True,
) -> ManufacturedProblem:
    """
    Build the staircase example on ``grid``

    The adjoint is phi = p'(t) f(x) with p the mollified signed plateau profile and
    f(x) = prod bump(x_i); alpha = |int f g| so that psi = -p * int f g has
    sup-norm alpha. With ``discrete`` the target is built on the grid and the dual-cell
    increments of the staircase are the exact discrete minimizer; this needs every node
    where the staircase moves to sit half a step inside a plateau.

    :param grid: any box containing [-1, 1]^d; the default setting uses [-2, 2]^2, T = 5
    :param eps: mollifier radius
    :param plateaus: (start, end, sign) intervals of the plateau profile
    :param g_scale: height of the indicator shape function
    :param pieces: Cantor pieces of the optimal control
    :param discrete: build the target from the discrete adjoint operators
    :raise ValidationError: if the mollified plateaus overlap or leave (0, T), or the time
        grid is too coarse for the discrete recipe
    """
    _check_grid(grid, plateaus, eps)
    plateaus = tuple(tuple(float(val) for val in item) for item in plateaus)
    d = grid.dim
    t = grid.times

    coords = grid.coordinates
    factors = bump(coords)
    spatial = np.prod(factors, axis=1)

    moment = shape_moment(d, g_scale)
    alpha = abs(moment)
    control = ExactControl((ExactComponent(cantor_pieces=tuple(pieces)),), grid.T)
    g = box_indicator(grid, _SUPPORT_HALF_WIDTH, g_scale)[None, :]
    metadata = ProblemMetadata(
        "cantor",
        {"d": d, "eps": eps, "plateaus": plateaus, "g_scale": g_scale, "alpha": alpha, "discrete": discrete},
        note="rising and falling Cantor staircases with plateau value 5",
    )

    if discrete:
        return build_discrete_manufactured(
            grid,
            g=g,
            alpha=np.array([alpha]),
            f=spatial,
            tails=-moment * mollified_plateau(t - 0.5 * grid.tau, eps, plateaus, grid.T),
            optimal=DerivativeControl(pin_derivative(control, grid), np.zeros(1)),
            exact_control=control,
            metadata=metadata,
        )

    second = bump_dxx(coords)
    laplacian = np.zeros(grid.n_space)
    for axis in range(d):
        others = np.prod(np.delete(factors, axis, axis=1), axis=1) if d > 1 else 1.0
        laplacian += second[:, axis] * others

    return build_manufactured(
        grid,
        g=g,
        alpha=np.array([alpha]),
        f=spatial,
        lap_f=laplacian,
        h=mollified_plateau_dt(t, eps, plateaus, derivative=1),
        h_tt=mollified_plateau_dt(t, eps, plateaus, derivative=3),
        exact_adjoint=(-moment * mollified_plateau(t, eps, plateaus, grid.T))[None, :],
        exact_control=control,
        exact_cost=None,
        metadata=metadata,
    )
