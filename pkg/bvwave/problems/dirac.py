"""
Finitely many jumps: the optimal control is a step function with l alternating unit
jumps at t_n = (1 + 2n)/l on Omega = (-1, 1)^d, T = 2.
"""

import logging

import numpy as np
from numpy.polynomial import Polynomial

from bvwave.core import DerivativeControl, ExactControl, Grid, ProblemMetadata, ValidationError, pin_derivative
from bvwave.helpers import bump, smooth_step
from bvwave.problems.manufactured import (
    ManufacturedProblem,
    box_indicator,
    build_discrete_manufactured,
    build_manufactured,
)


logger = logging.getLogger(__name__)

DIRAC_T = 2.0
DIRAC_BOUNDS = (-1.0, 1.0)
_SUPPORT_HALF_WIDTH = 0.5


def _check_config(d: int, l: int, alpha: float) -> None:
    if d not in (1, 2, 3):
        error_message = f"Dimension must be 1, 2 or 3, got {d}"
        logger.error(error_message)
        raise ValidationError(error_message)
    if l < 1:
        error_message = f"Number of jumps must be at least 1, got {l}"
        logger.error(error_message)
        raise ValidationError(error_message)
    if not alpha > 0.0:
        error_message = f"alpha must be positive, got {alpha}"
        logger.error(error_message)
        raise ValidationError(error_message)


def _shape_mass(d: int) -> float:
    """int of prod cos(pi x_i / 2) over [-1/2, 1/2]^d"""
    return (2.0 * np.sqrt(2.0) / np.pi) ** d


def dirac_beta(d: int, l: int, alpha: float) -> float:
    """
    Amplitude making max|p1| = alpha

    >>> round(dirac_beta(1, 1, 1.0) * 4.0 / (3.0 * np.pi) * 2.0 * np.sqrt(2.0) / np.pi, 12)
    1.0
    """
    _check_config(d, l, alpha)
    return alpha * (3.0 * np.pi * l / 4.0) / _shape_mass(d)


def dirac_exact_cost(d: int, l: int, alpha: float) -> float:
    """
    Optimal cost J = 1/2 ||(d_tt - laplace) phi||^2 + alpha * l
    """
    beta = dirac_beta(d, l, alpha)
    pi2 = np.pi ** 2
    mixed = d * pi2 / 4.0 - 5.0 * l ** 2 * pi2 / 4.0
    return beta ** 2 / 4.0 * mixed ** 2 + beta ** 2 * l ** 4 * pi2 ** 2 / 4.0 + alpha * l


def dirac_atoms(l: int):
    """(location, weight) pairs: ((1 + 2n)/l, (-1)^n)"""
    return tuple(((1.0 + 2.0 * n) / l, float((-1) ** n)) for n in range(l))


def dirac_adjoint(t: np.ndarray, d: int, l: int, alpha: float) -> np.ndarray:
    """p1(t) = -(4 beta / (3 pi l)) sin^3(l pi t / 2) (2 sqrt 2 / pi)^d"""
    beta = dirac_beta(d, l, alpha)
    return -(4.0 * beta / (3.0 * np.pi * l)) * np.sin(l * np.pi * np.asarray(t) / 2.0) ** 3 * _shape_mass(d)


def _dirac_tails(grid: Grid, nodes: np.ndarray, l: int, alpha: float) -> np.ndarray:
    """
    Tail sums whose pairwise averages peak at ``nodes`` with value exactly -alpha * sign

    The closed-form adjoint is warped so that each atom sits on its node, cut off smoothly
    before T and lifted by one symmetric bump per atom to hit alpha.
    """
    T, tau = grid.T, grid.tau
    locations, signs = np.array(dirac_atoms(l)).T
    node_times = grid.times[nodes]
    radius = 0.25 / l
    cutoff = 0.5 / l
    if not 0.5 * tau < radius:
        error_message = f"Time step {tau} is too coarse for {l} jumps"
        logger.error(error_message)
        raise ValidationError(error_message)

    shift = Polynomial.fit(
        np.concatenate(([0.0], node_times, [T])),
        np.concatenate(([0.0], locations - node_times, [0.0])),
        deg=l + 1,
    )
    samples = np.linspace(0.0, T, 16 * grid.nt)
    if np.min(1.0 + shift.deriv()(samples)) <= 0.0:
        error_message = f"Time grid with nt={grid.nt} cannot carry the jumps onto nodes monotonically"
        logger.error(error_message)
        raise ValidationError(error_message)

    def warped(t: np.ndarray) -> np.ndarray:
        fade = smooth_step((T - 0.25 * cutoff - t) / (0.75 * cutoff))
        return fade * dirac_adjoint(t + shift(t), grid.dim, l, alpha)

    def lift(t: np.ndarray, center: float) -> np.ndarray:
        return bump((t - center) / radius) / bump(0.0)

    def paired(profile, t):
        return 0.5 * (profile(t - 0.5 * tau) + profile(t + 0.5 * tau))

    heights = (-alpha * signs - paired(warped, node_times)) / paired(lambda t: lift(t, 0.0), np.zeros(1))

    def lifted(t: np.ndarray) -> np.ndarray:
        return warped(t) + sum(height * lift(t, center) for height, center in zip(heights, node_times))

    return lifted(grid.times - 0.5 * tau)


def build_dirac_example(grid: Grid, l: int = 3, alpha: float = 1.0, discrete: bool = True) -> ManufacturedProblem:
    """
    Build the jump example on ``grid``

    The adjoint is phi = beta sin(l pi t) sin(l pi t / 2) prod cos(pi x_i / 2), g is the
    indicator of [-1/2, 1/2]^d and the initial data vanish. With ``discrete`` the target is
    built on the grid so that one pin per jump, at the node whose dual cell holds it, is the
    exact discrete minimizer; otherwise the closed-form adjoint is used as is.

    :param grid: box (-1, 1)^d with T = 2
    :param l: number of jumps
    :param alpha: cost weight of the total variation
    :param discrete: build the target from the discrete adjoint operators
    :raise ValidationError: if the grid box or horizon differ from (-1, 1)^d and T = 2, or
        the time grid cannot resolve the jumps
    """
    d = grid.dim
    _check_config(d, l, alpha)
    if not np.isclose(grid.T, DIRAC_T) or any(
            not (np.isclose(lo, DIRAC_BOUNDS[0]) and np.isclose(hi, DIRAC_BOUNDS[1]))
            for lo, hi in zip(grid.space_lo, grid.space_hi)
    ):
        error_message = f"The jump example lives on (-1, 1)^{d} with T = 2, got {grid}"
        logger.error(error_message)
        raise ValidationError(error_message)

    beta = dirac_beta(d, l, alpha)
    t = grid.times
    omega = l * np.pi
    spatial = np.prod(np.cos(np.pi * grid.coordinates / 2.0), axis=1)
    spatial[grid.boundary_mask] = 0.0
    g = box_indicator(grid, _SUPPORT_HALF_WIDTH)[None, :]
    control = ExactControl.from_atoms(dirac_atoms(l), grid.T)
    parameters = {
        "d": d, "l": l, "alpha": alpha, "beta": beta, "discrete": discrete,
        "continuous_cost": dirac_exact_cost(d, l, alpha),
    }
    metadata = ProblemMetadata("dirac", parameters, note="step control with alternating unit jumps")

    if discrete:
        pins = pin_derivative(control, grid)
        nodes = np.flatnonzero(pins[0])
        if nodes.size != l:
            error_message = f"Time grid with nt={grid.nt} puts two jumps into one cell"
            logger.error(error_message)
            raise ValidationError(error_message)
        return build_discrete_manufactured(
            grid,
            g=g,
            alpha=np.array([alpha]),
            f=spatial,
            tails=_dirac_tails(grid, nodes, l, alpha),
            optimal=DerivativeControl(pins, np.zeros(1)),
            exact_control=control,
            metadata=metadata,
        )

    temporal = beta * np.sin(omega * t) * np.sin(omega * t / 2.0)
    temporal_tt = beta * (
        -1.25 * omega ** 2 * np.sin(omega * t) * np.sin(omega * t / 2.0)
        + omega ** 2 * np.cos(omega * t) * np.cos(omega * t / 2.0)
    )
    return build_manufactured(
        grid,
        g=g,
        alpha=np.array([alpha]),
        f=spatial,
        lap_f=-d * np.pi ** 2 / 4.0 * spatial,
        h=temporal,
        h_tt=temporal_tt,
        exact_adjoint=dirac_adjoint(t, d, l, alpha)[None, :],
        exact_control=control,
        exact_cost=dirac_exact_cost(d, l, alpha),
        metadata=metadata,
    )
