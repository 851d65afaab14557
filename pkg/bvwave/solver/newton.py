"""
Semi-smooth Newton method for F_gamma(v, c) = 0 at fixed gamma

The Newton derivative is applied matrix-free (two wave solves per application) and
inverted with restarted GMRES.
"""

import logging
import time
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from bvwave.control import (
    apply_B,
    apply_Bstar,
    apply_S,
    adjoint_from_state,
    cost_breakdown,
    residual_F,
    residual_norm,
)
from bvwave.core import (
    DerivativeControl,
    KrylovError,
    ProblemData,
    RegularizationParams,
    SolveReport,
    SolverError,
    ValidationError,
)
from bvwave.fem import assemble
from bvwave.helpers import integrate


logger = logging.getLogger(__name__)

_RETRY_FACTOR = 10.0


class ActiveSets(NamedTuple):
    """
    Nodes where |psi_j| > alpha_j (strict); the Newton derivative keeps the
    psi-coupling there and is the identity elsewhere
    """

    mask: np.ndarray

    @classmethod
    def from_adjoint(cls, psi: np.ndarray, alpha: np.ndarray) -> "ActiveSets":
        return cls(np.abs(psi) > np.asarray(alpha)[:, None])

    @classmethod
    def empty(cls, m: int, nt: int) -> "ActiveSets":
        return cls(np.zeros((m, nt), dtype=bool))

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(int(count) for count in self.mask.sum(axis=1))


def _hessian_blocks(data: ProblemData, h: np.ndarray, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """B* L* L B (h, k)"""
    ops = assemble(data.geometry)
    state = ops.apply_L(apply_B(data, DerivativeControl(h, k)))
    return apply_Bstar(data, ops.apply_Lstar(state))


def apply_DF(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        active: ActiveSets,
        h: np.ndarray,
        k: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Newton derivative of F_gamma applied to (h, k)

    :return: (h + mask * H1 / gamma, kappa/gamma * k + H2 / gamma) with (H1, H2) = B*L*LB(h, k)
    """
    if not gamma > 0.0:
        error_message = f"gamma must be positive, got {gamma}"
        logger.error(error_message)
        raise ValidationError(error_message)
    first, second = _hessian_blocks(data, h, k)
    return (
        h + active.mask * first / gamma,
        params.kappa(gamma) / gamma * np.asarray(k) + second / gamma,
    )


def newton_operator(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        active: ActiveSets,
) -> LinearOperator:
    """:func:`apply_DF` as a LinearOperator on the stacked vector (v.ravel(), c)"""
    m, nt = data.m, data.geometry.nt
    size = m * nt + m

    def matvec(vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector, dtype=np.float64).ravel()
        first, second = apply_DF(data, params, gamma, active, vector[: m * nt].reshape(m, nt), vector[m * nt:])
        return np.concatenate([first.ravel(), second])

    return LinearOperator((size, size), matvec=matvec, dtype=np.float64)


def krylov_solve(
        operator: LinearOperator,
        rhs: np.ndarray,
        tol: float = 1e-10,
        restart: int = 50,
        max_iter: int = 2000,
        x0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, int]:
    """
    Restarted GMRES with a relative residual tolerance

    :param operator: the Newton derivative
    :param rhs: right-hand side
    :param tol: relative tolerance
    :param restart: Krylov subspace dimension between restarts
    :param max_iter: cap on the total number of inner iterations
    :param x0: starting guess
    :raise KrylovError: when the tolerance is not reached; carries the best iterate
    :return: solution and number of inner iterations
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return np.zeros_like(rhs), 0

    iterations = [0]

    def count(_residual):
        iterations[0] += 1

    cycles = max(1, int(np.ceil(max_iter / restart)))
    solution, info = gmres(
        operator,
        rhs,
        x0=x0,
        rtol=tol,
        atol=0.0,
        restart=restart,
        maxiter=cycles,
        callback=count,
        callback_type="pr_norm",
    )
    relative = float(np.linalg.norm(operator.matvec(solution) - rhs) / rhs_norm)
    logger.debug("GMRES: info=%d, iterations=%d, relative residual=%.3e", info, iterations[0], relative)
    if info != 0:
        error_message = f"GMRES stagnated after {iterations[0]} iterations (relative residual {relative:.3e})"
        logger.error(error_message)
        raise KrylovError(error_message, best_iterate=solution, iterations=iterations[0], relative_residual=relative)
    return solution, iterations[0]


def _newton_step(
        operator: LinearOperator,
        rhs: np.ndarray,
        params: RegularizationParams,
) -> Tuple[np.ndarray, int]:
    try:
        return krylov_solve(
            operator, rhs, params.krylov_tol, params.krylov_restart, params.krylov_max_iter
        )
    except KrylovError as error:
        looser = params.krylov_tol * _RETRY_FACTOR
        logger.warning("Retrying the Newton step with Krylov tolerance %.1e", looser)
        step, retried = krylov_solve(
            operator, rhs, looser, params.krylov_restart, params.krylov_max_iter, x0=error.best_iterate
        )
        return step, error.iterations + retried


def value_function_derivative(
        params: RegularizationParams,
        gamma: float,
        dc: DerivativeControl,
        tau: float,
) -> float:
    """V'(gamma) = 1/2 sum_j ||v_j||^2_{L2(I)} + kappa'(gamma)/2 |c|^2"""
    return 0.5 * float(np.sum(integrate(np.square(dc.v), tau))) + 0.5 * params.kappa_prime(gamma) * float(
        np.sum(np.square(dc.c))
    )


def semismooth_newton(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        start: Optional[DerivativeControl] = None,
        on_iteration: Optional[Callable[[int, float], None]] = None,
) -> Tuple[DerivativeControl, SolveReport]:
    """
    Solve F_gamma(v, c) = 0 with full semi-smooth Newton steps

    Each iteration recomputes psi and the active sets at the current iterate and solves
    DF step = -F with GMRES. A stagnating inner solve is retried once with a ten times
    looser tolerance before the error propagates.

    :param data: the problem
    :param params: regularization and solver parameters
    :param gamma: regularization parameter
    :param start: initial iterate (zero if omitted)
    :param on_iteration: called with (iteration, residual norm) after each residual evaluation
    :raise SolverError: when the inner solve fails twice
    :return: final iterate and its report; ``converged`` is False when the iteration cap is hit
    """
    if not gamma > 0.0:
        error_message = f"gamma must be positive, got {gamma}"
        logger.error(error_message)
        raise ValidationError(error_message)
    tau = data.geometry.tau
    m, nt = data.m, data.geometry.nt
    iterate = start if start is not None else DerivativeControl.zeros(m, nt)
    if iterate.m != m or iterate.nt != nt:
        error_message = f"Start control has shape ({iterate.m}, {iterate.nt}), expected ({m}, {nt})"
        logger.error(error_message)
        raise ValidationError(error_message)

    began = time.perf_counter()
    residuals = []
    krylov_counts = []
    converged = False
    iteration = 0
    while True:
        state = apply_S(data, iterate)
        adjoint = adjoint_from_state(data, state)
        first, second = residual_F(data, params, gamma, iterate, adjoint)
        norm = residual_norm(first, second, tau)
        residuals.append(norm)
        logger.info("gamma=%.3e newton iteration %d: |F|=%.6e", gamma, iteration, norm)
        if on_iteration is not None:
            on_iteration(iteration, norm)
        if norm <= params.tol_newton:
            converged = True
            break
        if iteration >= params.max_newton_iters:
            logger.warning(
                "Newton reached %d iterations at gamma=%.3e with |F|=%.3e", iteration, gamma, norm
            )
            break

        active = ActiveSets.from_adjoint(adjoint.psi, data.alpha)
        logger.debug("Active set sizes: %s", active.sizes)
        operator = newton_operator(data, params, gamma, active)
        rhs = -np.concatenate([first.ravel(), second])
        step, krylov_iterations = _newton_step(operator, rhs, params)
        krylov_counts.append(krylov_iterations)
        iterate = iterate + DerivativeControl.from_vector(step, m, nt)
        iteration += 1

    cost = cost_breakdown(data, params, gamma, iterate, state)
    report = SolveReport(
        gamma=gamma,
        iterations=iteration,
        residual_norms=tuple(residuals),
        krylov_iterations=tuple(krylov_counts),
        value=cost.total,
        cost=cost,
        value_derivative=value_function_derivative(params, gamma, iterate, tau),
        wall_time=time.perf_counter() - began,
        converged=converged,
    )
    return iterate, report


def dense_newton_matrix(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        active: ActiveSets,
) -> np.ndarray:
    """
    Dense Newton derivative built from the forward map only

    Columns of T = L B are computed unit vector by unit vector, and the Hessian part is
    W_ctrl^{-1} T^T W_state T with the quadrature weight matrices written out. Intended
    for small grids.
    """
    ops = assemble(data.geometry)
    grid = data.geometry
    m, nt = data.m, grid.nt
    size = m * nt + m
    columns = []
    for index in range(size):
        unit = np.zeros(size)
        unit[index] = 1.0
        control = DerivativeControl.from_vector(unit, m, nt)
        columns.append(ops.apply_L(apply_B(data, control)).values.ravel())
    forward = np.stack(columns, axis=1)

    mass = ops.mass_full.toarray()
    weighted = np.concatenate(
        [(weight * (mass @ forward.reshape(nt, grid.n_space, size)[n])) for n, weight in enumerate(grid.time_weights)]
    )
    control_weights = np.concatenate([np.tile(grid.time_weights, m), np.ones(m)])
    hessian = (forward.T @ weighted) / control_weights[:, None]

    identity_part = np.concatenate([np.ones(m * nt), np.full(m, params.kappa(gamma) / gamma)])
    row_scale = np.concatenate([active.mask.ravel().astype(np.float64), np.ones(m)])
    return np.diag(identity_part) + row_scale[:, None] * hessian / gamma


def dense_condition_number(
        data: ProblemData,
        params: RegularizationParams,
        gamma: float,
        active: ActiveSets,
) -> float:
    """2-norm condition number of :func:`dense_newton_matrix`"""
    matrix = dense_newton_matrix(data, params, gamma, active)
    try:
        return float(np.linalg.cond(matrix))
    except np.linalg.LinAlgError as error:
        error_message = f"Condition number evaluation failed: {error}"
        logger.error(error_message)
        raise SolverError(error_message) from error
