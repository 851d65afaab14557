"""
Control-side operators of the tracking problem

B maps a derivative control (v, c) to the forcing sum_j u_j(t) g_j(x) with
u = c + int_0^t v ds; B* is its transpose in the trapezoid-weighted control product.
S = L o B + Q is the control-to-state map and psi = B* L* (S(v, c) - y_d) the adjoint
functional that drives the prox-based optimality system.
"""

import logging
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np

from bvwave.core import (
    CostBreakdown,
    DerivativeControl,
    ExactControl,
    ProblemData,
    RegularizationParams,
    SpaceTimeField,
    ValidationError,
    evaluate_exact_control,
    total_variation,
)
from bvwave.fem import assemble
from bvwave.helpers import cumulative_trapezoid, cumulative_trapezoid_adjoint, integrate


logger = logging.getLogger(__name__)

ControlBlocks = Tuple[np.ndarray, np.ndarray]


class AdjointFunctional(NamedTuple):
    """
    psi[j, k] samples int_Omega int_{t_k}^T p g_j; psi0[j] is the full space-time integral
    """

    psi: np.ndarray
    psi0: np.ndarray


def _check_gamma(gamma: float) -> None:
    if not gamma > 0.0:
        error_message = f"gamma must be positive, got {gamma}"
        logger.error(error_message)
        raise ValidationError(error_message)


def _check_control(data: ProblemData, dc: DerivativeControl) -> None:
    if dc.m != data.m or dc.nt != data.geometry.nt:
        error_message = (
            f"Control of shape (m={dc.m}, nt={dc.nt}) does not match the problem "
            f"(m={data.m}, nt={data.geometry.nt})"
        )
        logger.error(error_message)
        raise ValidationError(error_message)


def control_values(dc: DerivativeControl, tau: float) -> np.ndarray:
    """u_j(t_k) = c_j + left-closed cumulative trapezoid of v_j"""
    return dc.c[:, None] + cumulative_trapezoid(dc.v, tau)


def forcing_from_values(data: ProblemData, u: np.ndarray) -> SpaceTimeField:
    """sum_j u_j(t) g_j(x) for nodal control samples u of shape (m, nt)"""
    return SpaceTimeField(np.asarray(u).T @ data.g, data.geometry)


def apply_B(data: ProblemData, dc: DerivativeControl) -> SpaceTimeField:
    _check_control(data, dc)
    return forcing_from_values(data, control_values(dc, data.geometry.tau))


def _g_moments(data: ProblemData, phi: SpaceTimeField) -> np.ndarray:
    """z[j, n] = g_j^T M phi^n"""
    ops = assemble(data.geometry)
    weighted_g = (ops.mass_full @ data.g.T).T
    return weighted_g @ phi.values.T


def apply_Bstar(data: ProblemData, phi: SpaceTimeField) -> ControlBlocks:
    """
    Transpose of :func:`apply_B`

    :param data: the problem data
    :param phi: a state-shaped field
    :return: (first block of shape (m, nt), second block of shape (m,))
    """
    tau = data.geometry.tau
    moments = _g_moments(data, phi)
    return cumulative_trapezoid_adjoint(moments, tau), integrate(moments, tau)


def state_from_values(data: ProblemData, u: np.ndarray) -> SpaceTimeField:
    """S~(u) = L(sum_j u_j g_j) + Q(y0, y1) for nodal control samples"""
    ops = assemble(data.geometry)
    return ops.solve_wave(forcing_from_values(data, u), data.y0, data.y1)


def apply_S(data: ProblemData, dc: DerivativeControl) -> SpaceTimeField:
    """S(v, c) = L(B(v, c)) + Q(y0, y1) in one combined solve"""
    _check_control(data, dc)
    return state_from_values(data, control_values(dc, data.geometry.tau))


def adjoint_from_state(data: ProblemData, state: SpaceTimeField) -> AdjointFunctional:
    """psi = B* L* (state - y_d)"""
    ops = assemble(data.geometry)
    psi, psi0 = apply_Bstar(data, ops.apply_Lstar(state - data.yd))
    return AdjointFunctional(psi, psi0)


def compute_adjoint_functional(data: ProblemData, dc: DerivativeControl) -> AdjointFunctional:
    return adjoint_from_state(data, apply_S(data, dc))


def prox(p: np.ndarray, alpha: Union[float, np.ndarray], gamma: float) -> np.ndarray:
    """
    Minimizer of alpha |v| + gamma/2 (v - p)^2, node by node

    Soft thresholding with dead zone |p| <= alpha / gamma.

    :param p: the scaled argument, shape (m, nt) or broadcastable
    :param alpha: weights, scalar or one per component
    :param gamma: regularization parameter
    :raise ValidationError: if gamma is not positive

    >>> prox(np.array([3.0, 0.3, -3.0]), 1.0, 2.0).tolist()
    [2.5, 0.0, -2.5]
    """
    _check_gamma(gamma)
    p = np.asarray(p, dtype=np.float64)
    threshold = np.asarray(alpha, dtype=np.float64) / gamma
    if threshold.ndim == 1 and p.ndim == 2:
        threshold = threshold[:, None]
    return np.maximum(0.0, p - threshold) + np.minimum(0.0, p + threshold)


def residual_F(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        dc: DerivativeControl,
        adjoint: Optional[AdjointFunctional] = None,
) -> ControlBlocks:
    """
    Optimality residual F_gamma(v, c)

    First block v - prox(-psi/gamma); second block (kappa/gamma) c + psi0/gamma.

    :param adjoint: psi at ``dc`` if already computed
    """
    _check_gamma(gamma)
    if adjoint is None:
        adjoint = compute_adjoint_functional(data, dc)
    first = dc.v - prox(-adjoint.psi / gamma, data.alpha, gamma)
    second = params.kappa(gamma) / gamma * dc.c + adjoint.psi0 / gamma
    return first, second


def residual_norm(first: np.ndarray, second: np.ndarray, tau: float) -> float:
    """Norm in L2(I)^m x R^m with trapezoid quadrature"""
    return float(np.sqrt(np.sum(integrate(np.square(first), tau)) + np.sum(np.square(second))))


def gram_matrix(data: ProblemData) -> np.ndarray:
    """
    G_ij = <L g_i, L g_j>_h for the time-constant controls u = e_i
    """
    ops = assemble(data.geometry)
    nt = data.geometry.nt
    states = [
        ops.apply_L(SpaceTimeField(np.tile(g_row, (nt, 1)), data.geometry)) for g_row in data.g
    ]
    gram = np.array([[ops.inner(first, second) for second in states] for first in states])
    return 0.5 * (gram + gram.T)


def cost_breakdown(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        dc: DerivativeControl,
        state: Optional[SpaceTimeField] = None,
) -> CostBreakdown:
    """Terms of J^1_gamma at ``dc``; gamma = 0 gives the surrogate J"""
    ops = assemble(data.geometry)
    tau = data.geometry.tau
    if state is None:
        state = apply_S(data, dc)
    misfit = state - data.yd
    return CostBreakdown(
        tracking=0.5 * ops.inner(misfit, misfit),
        l1=float(np.sum(data.alpha * integrate(np.abs(dc.v), tau))),
        h1=0.5 * gamma * float(np.sum(integrate(np.square(dc.v), tau))),
        offset=0.5 * params.kappa(gamma) * float(np.sum(np.square(dc.c))),
    )


def cost_Jgamma(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        dc: DerivativeControl,
) -> float:
    return cost_breakdown(data, params, gamma, dc).total


def cost_J(data: ProblemData, control: Union[DerivativeControl, ExactControl]) -> float:
    """
    Unregularized cost: tracking term plus alpha-weighted total variation

    A :class:`DerivativeControl` contributes the trapezoid L1 norm of v; an
    :class:`ExactControl` is sampled on the grid and contributes its exact variation.
    """
    ops = assemble(data.geometry)
    if isinstance(control, ExactControl):
        state = state_from_values(data, evaluate_exact_control(control, data.geometry))
        variation = float(np.sum(data.alpha * total_variation(control)))
    else:
        state = apply_S(data, control)
        variation = float(np.sum(data.alpha * integrate(np.abs(control.v), data.geometry.tau)))
    misfit = state - data.yd
    return 0.5 * ops.inner(misfit, misfit) + variation


def smooth_gradient(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        dc: DerivativeControl,
) -> ControlBlocks:
    """
    Gradient of the differentiable part of J^1_gamma in the weighted control product:
    (psi + gamma v, psi0 + kappa c)
    """
    adjoint = compute_adjoint_functional(data, dc)
    return adjoint.psi + gamma * dc.v, adjoint.psi0 + params.kappa(gamma) * dc.c
