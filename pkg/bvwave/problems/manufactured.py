"""
Manufactured optimal control problems with known solution

Two recipes. The continuous one takes an adjoint phi(t, x) = h(t) f(x) in closed form and
sets y_d = S~(u) - (f h'' - h laplace(f)); the discrete optimality system then holds up to
the discretization error, which makes it the recipe for refinement studies. The discrete
one inverts B* and L* on the grid itself, so the chosen discrete control is optimal to
rounding; path runs and recovery checks use it.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from bvwave.control import adjoint_from_state, apply_Bstar, control_values, state_from_values
from bvwave.core import (
    DerivativeControl,
    ExactComponent,
    ExactControl,
    Grid,
    ManufacturedCheck,
    ProblemData,
    ProblemMetadata,
    SpaceTimeField,
    ValidationError,
    evaluate_exact_control,
    total_variation,
)
from bvwave.fem import assemble
from bvwave.helpers import integrate


logger = logging.getLogger(__name__)

_SUP_TOLERANCE = 1e-6
_EXACT_TOLERANCE = 1e-9
_MOMENT_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ManufacturedProblem:
    """
    A problem together with its optimal control and the adjoint functional at it

    :param data: problem data including the manufactured target
    :param exact_control: the optimal control
    :param exact_adjoint: psi at the optimal control sampled on the time grid, shape (m, nt)
    :param exact_cost: optimal cost J when known
    :param metadata: construction parameters
    :param optimal: the discrete minimizer (v, c) when the target was built on the grid
    """

    data: ProblemData
    exact_control: ExactControl
    exact_adjoint: np.ndarray
    exact_cost: Optional[float]
    metadata: ProblemMetadata
    optimal: Optional[DerivativeControl] = None

    def __post_init__(self) -> None:
        adjoint = np.array(self.exact_adjoint, dtype=np.float64, copy=True)
        expected = (self.data.m, self.data.geometry.nt)
        if adjoint.shape != expected:
            error_message = f"exact_adjoint must have shape {expected}, got {adjoint.shape}"
            logger.error(error_message)
            raise ValidationError(error_message)
        if self.exact_control.m != self.data.m:
            error_message = "exact_control and the shape functions disagree on the number of components"
            logger.error(error_message)
            raise ValidationError(error_message)
        if self.optimal is not None and (self.optimal.m, self.optimal.nt) != expected:
            error_message = f"optimal control must have shape {expected}"
            logger.error(error_message)
            raise ValidationError(error_message)
        adjoint.flags.writeable = False
        object.__setattr__(self, "exact_adjoint", adjoint)

    @property
    def grid(self) -> Grid:
        return self.data.geometry

    def optimal_values(self) -> np.ndarray:
        """Nodal values of the optimal control on the problem's grid, shape (m, nt)"""
        if self.optimal is not None:
            return control_values(self.optimal, self.grid.tau)
        return evaluate_exact_control(self.exact_control, self.grid)


def box_indicator(grid: Grid, half_width: float, scale: float = 1.0) -> np.ndarray:
    """
    scale * indicator of [-half_width, half_width]^d at the nodes

    Nodes on the edge of the box get the value 1/2 per axis.
    """
    factors = []
    for axis in grid.axes:
        distance = np.abs(axis)
        values = np.where(distance < half_width, 1.0, 0.0)
        values[np.isclose(distance, half_width, rtol=0.0, atol=1e-12)] = 0.5
        factors.append(values)
    mesh = np.meshgrid(*factors, indexing="ij")
    return scale * np.prod(np.stack([factor.ravel() for factor in mesh]), axis=0)


def build_manufactured(
        grid: Grid,
        g: np.ndarray,
        alpha: np.ndarray,
        f: np.ndarray,
        lap_f: np.ndarray,
        h: np.ndarray,
        h_tt: np.ndarray,
        exact_adjoint: np.ndarray,
        exact_control: ExactControl,
        y0: Optional[np.ndarray] = None,
        y1: Optional[np.ndarray] = None,
        exact_cost: Optional[float] = None,
        metadata: Optional[ProblemMetadata] = None,
) -> ManufacturedProblem:
    """
    Generic recipe

    :param grid: the grid
    :param g: shape functions at the nodes, shape (m, n_space)
    :param alpha: weights, shape (m,)
    :param f: spatial factor of the adjoint at the nodes (vanishing on the boundary)
    :param lap_f: its Laplacian at the nodes
    :param h: temporal factor of the adjoint at the time nodes
    :param h_tt: its second derivative at the time nodes
    :param exact_adjoint: psi at the optimum, shape (m, nt)
    :param exact_control: the optimal control
    :param y0: initial displacement (zero if omitted)
    :param y1: initial velocity (zero if omitted)
    """
    n_space = grid.n_space
    y0 = np.zeros(n_space) if y0 is None else np.asarray(y0, dtype=np.float64)
    y1 = np.zeros(n_space) if y1 is None else np.asarray(y1, dtype=np.float64)
    source = np.outer(h_tt, f) - np.outer(h, lap_f)

    provisional = ProblemData(grid, g, alpha, y0, y1, SpaceTimeField.zeros(grid))
    optimal_state = state_from_values(provisional, evaluate_exact_control(exact_control, grid))
    yd = SpaceTimeField(optimal_state.values - source, grid)
    data = ProblemData(grid, g, alpha, y0, y1, yd)
    return ManufacturedProblem(
        data=data,
        exact_control=exact_control,
        exact_adjoint=exact_adjoint,
        exact_cost=exact_cost,
        metadata=metadata or ProblemMetadata("manufactured"),
    )


def build_discrete_manufactured(
        grid: Grid,
        g: np.ndarray,
        alpha: np.ndarray,
        f: np.ndarray,
        tails: np.ndarray,
        optimal: DerivativeControl,
        exact_control: ExactControl,
        y0: Optional[np.ndarray] = None,
        y1: Optional[np.ndarray] = None,
        metadata: Optional[ProblemMetadata] = None,
) -> ManufacturedProblem:
    """
    Exact recipe on the grid: ``optimal`` satisfies the discrete optimality system

    The discrete adjoint is phi_h = q(t) f(x) with q chosen so that the running tail sums
    of psi_1 are ``tails``, i.e. psi_1[k] = (tails[k] + tails[k + 1]) / 2 for 0 < k < nt - 1.
    The target is y_d = S(optimal) - w with L* w = phi_h. The first two levels of phi_h are
    adjusted so that w exists and psi0 = 0.

    :param grid: the grid
    :param g: shape functions at the nodes, shape (m, n_space)
    :param alpha: weights, shape (m,)
    :param f: spatial factor of the adjoint at the nodes
    :param tails: tail sums of the first adjoint component, shape (nt,); entries 0 and 1 are ignored
    :param optimal: the discrete optimal derivative control
    :param exact_control: the control it approximates, used by the diagnostics
    :param y0: initial displacement (zero if omitted)
    :param y1: initial velocity (zero if omitted)
    :raise ValidationError: if the grid is too coarse for ``optimal`` to be optimal
    """
    ops = assemble(grid)
    n_space = grid.n_space
    weights = grid.time_weights
    y0 = np.zeros(n_space) if y0 is None else np.asarray(y0, dtype=np.float64)
    y1 = np.zeros(n_space) if y1 is None else np.asarray(y1, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    spatial = np.where(grid.boundary_mask, 0.0, np.asarray(f, dtype=np.float64))
    tails = np.asarray(tails, dtype=np.float64)
    if tails.shape != (grid.nt,):
        error_message = f"tails must have shape ({grid.nt},), got {tails.shape}"
        logger.error(error_message)
        raise ValidationError(error_message)

    weighted_g = (ops.mass_full @ np.asarray(g, dtype=np.float64).T).T
    moment = float(weighted_g[0] @ spatial)
    if abs(moment) < _MOMENT_FLOOR * float(np.max(np.abs(weighted_g[0]))):
        error_message = "The spatial factor is orthogonal to the first shape function"
        logger.error(error_message)
        raise ValidationError(error_message)

    following = np.append(tails[1:], 0.0)
    temporal = np.zeros(grid.nt)
    temporal[2:] = (tails[2:] - following[2:]) / (weights[2:] * moment)
    phi = np.outer(temporal, spatial)

    # level 0 of L* w is free: spend it on psi0 = 0 along the shape functions
    _, attained = ops.lstar_preimage(SpaceTimeField(phi, grid))
    partial = weighted_g @ (weights[1:] @ attained.values[1:])
    basis = np.where(grid.boundary_mask, 0.0, np.asarray(g, dtype=np.float64))
    gram = weighted_g @ basis.T
    phi[0] = -np.linalg.solve(gram, partial) @ basis / weights[0]
    phi[1] = attained.values[1]
    w, attained = ops.lstar_preimage(SpaceTimeField(phi, grid))

    provisional = ProblemData(grid, g, alpha, y0, y1, SpaceTimeField.zeros(grid))
    psi, psi0 = apply_Bstar(provisional, attained)
    _check_discrete_optimality(optimal, alpha, psi, psi0)

    state = state_from_values(provisional, control_values(optimal, grid.tau))
    data = ProblemData(grid, g, alpha, y0, y1, SpaceTimeField(state.values - w.values, grid))
    exact_cost = 0.5 * ops.inner(w, w) + float(np.sum(alpha * integrate(np.abs(optimal.v), grid.tau)))
    return ManufacturedProblem(
        data=data,
        exact_control=exact_control,
        exact_adjoint=psi,
        exact_cost=exact_cost,
        metadata=metadata or ProblemMetadata("manufactured"),
        optimal=optimal,
    )


def _check_discrete_optimality(optimal: DerivativeControl, alpha: np.ndarray, psi: np.ndarray,
                               psi0: np.ndarray) -> None:
    scale = _EXACT_TOLERANCE * alpha
    excess = np.max(np.abs(psi), axis=1) - alpha
    support = optimal.v != 0.0
    mismatch = np.where(support, np.abs(psi + alpha[:, None] * np.sign(optimal.v)), 0.0)
    if np.any(excess > scale) or np.any(np.max(mismatch, axis=1) > scale):
        error_message = (
            f"Time grid too coarse for an exact discrete optimum: max|psi| - alpha = {excess.tolist()}, "
            f"support mismatch = {np.max(mismatch, axis=1).tolist()}"
        )
        logger.error(error_message)
        raise ValidationError(error_message)
    if np.max(np.abs(psi0)) > scale.max():
        error_message = f"Exact discrete optimum needs psi0 = 0, got {psi0.tolist()}"
        logger.error(error_message)
        raise ValidationError(error_message)


def build_zero_problem(grid: Grid, alpha: float = 1.0, m: int = 1) -> ManufacturedProblem:
    """
    y_d = Q(0, 0) = 0: the optimal control vanishes

    Shape functions are indicators of m disjoint slabs along the first axis.
    """
    if m < 1:
        error_message = f"Number of controls must be at least 1, got {m}"
        logger.error(error_message)
        raise ValidationError(error_message)
    lo, hi = grid.space_lo[0], grid.space_hi[0]
    first = grid.coordinates[:, 0]
    edges = np.linspace(lo, hi, m + 1)
    g = np.zeros((m, grid.n_space))
    for j in range(m):
        inside = (first > edges[j]) & (first < edges[j + 1]) & ~grid.boundary_mask
        g[j, inside] = 1.0
    if np.any(~g.any(axis=1)):
        error_message = f"Grid too coarse for {m} controls"
        logger.error(error_message)
        raise ValidationError(error_message)
    zero = np.zeros(grid.n_space)
    data = ProblemData(grid, g, np.full(m, float(alpha)), zero, zero, SpaceTimeField.zeros(grid))
    control = ExactControl(tuple(ExactComponent() for _ in range(m)), grid.T)
    return ManufacturedProblem(
        data=data,
        exact_control=control,
        exact_adjoint=np.zeros((m, grid.nt)),
        exact_cost=0.0,
        metadata=ProblemMetadata("zero", {"alpha": float(alpha), "m": m}),
    )


def complementarity_gap(problem: ManufacturedProblem, psi: np.ndarray) -> np.ndarray:
    """
    TV(u_j) - sum_k (-psi_j(t_k) / alpha_j) (u_j(t_k) - u_j(t_{k-1}))

    Non-negative whenever |psi_j| <= alpha_j and zero when the increments of the control
    sit where -psi_j / alpha_j equals their sign. With a discrete minimizer the pairing is
    node by node: int |v_j| + psi_j v_j / alpha_j.
    """
    alpha = problem.data.alpha[:, None]
    psi = np.asarray(psi)
    if problem.optimal is not None:
        v = problem.optimal.v
        return integrate(np.abs(v) + psi * v / alpha, problem.grid.tau)
    values = evaluate_exact_control(problem.exact_control, problem.grid)
    increments = np.diff(values, axis=1)
    return total_variation(problem.exact_control) - np.sum(-psi[:, 1:] / alpha * increments, axis=1)


def check_manufactured(problem: ManufacturedProblem) -> ManufacturedCheck:
    """Errors of the discrete adjoint functional at the optimal control on the problem's own grid"""
    data = problem.data
    adjoint = adjoint_from_state(data, state_from_values(data, problem.optimal_values()))
    sup_excess = np.max(np.abs(adjoint.psi), axis=1) - data.alpha
    return ManufacturedCheck(
        nt=data.geometry.nt,
        nx=data.geometry.nx,
        adjoint_error=float(np.max(np.abs(adjoint.psi - problem.exact_adjoint))),
        sup_norm_excess=float(max(0.0, np.max(sup_excess))),
        complementarity_gap=float(np.max(np.abs(complementarity_gap(problem, adjoint.psi)))),
        psi0=float(np.max(np.abs(adjoint.psi0))),
    )


def verify_manufactured(
        build: Callable[[Grid], ManufacturedProblem],
        grid: Grid,
        levels: int = 3,
) -> List[ManufacturedCheck]:
    """
    Refinement study: rebuild the problem on successively refined grids and check it

    :param build: problem builder for a given grid
    :param grid: coarsest grid
    :param levels: number of grids, each halving tau and every hx
    """
    checks = []
    for level in range(levels):
        check = check_manufactured(build(grid))
        logger.info(
            "Level %d (nt=%d, nx=%s): adjoint error %.3e, sup excess %.3e, gap %.3e",
            level, check.nt, check.nx, check.adjoint_error, check.sup_norm_excess, check.complementarity_gap,
        )
        if check.sup_norm_excess > _SUP_TOLERANCE:
            logger.warning("Level %d: max|psi| exceeds alpha by %.3e", level, check.sup_norm_excess)
        checks.append(check)
        grid = grid.refined()
    return checks


def empirical_orders(errors: List[float]) -> List[float]:
    """log2 of successive error ratios"""
    return [float(np.log2(coarse / fine)) for coarse, fine in zip(errors[:-1], errors[1:])]
