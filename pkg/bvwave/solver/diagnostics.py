"""
Post-run checks of a finished path: value function shape, cost gap, sparsity, sup-norm
bound, sign separation and distance to a known exact control.
"""

import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from bvwave.control import compute_adjoint_functional, control_values
from bvwave.core import (
    DerivativeControl,
    Diagnostics,
    ExactControl,
    Grid,
    ProblemData,
    SolveReport,
    evaluate_exact_control,
    total_variation,
)
from bvwave.helpers import integrate


logger = logging.getLogger(__name__)

_SHAPE_SLACK = 1e-8
_GAP_STAGES = 3


class JumpCluster(NamedTuple):
    """Run of neighbouring nodes where |v| is significant"""

    start: float
    end: float
    center: float
    mass: float


def jump_clusters(v: np.ndarray, grid: Grid, threshold: float = 1e-3, gap: int = 2) -> List[JumpCluster]:
    """
    Group the nodes with |v| > threshold * max|v| into clusters

    :param v: one component of the derivative control, shape (nt,)
    :param grid: the grid
    :param threshold: relative cut-off
    :param gap: largest index distance inside one cluster
    """
    v = np.asarray(v, dtype=np.float64)
    peak = float(np.max(np.abs(v))) if v.size else 0.0
    if peak == 0.0:
        return []
    nodes = np.flatnonzero(np.abs(v) > threshold * peak)
    weights = grid.time_weights
    times = grid.times
    clusters = []
    for run in np.split(nodes, np.flatnonzero(np.diff(nodes) > gap) + 1):
        mass = float(np.sum(weights[run] * v[run]))
        spread = weights[run] * np.abs(v[run])
        clusters.append(
            JumpCluster(
                start=float(times[run[0]]),
                end=float(times[run[-1]]),
                center=float(np.sum(spread * times[run]) / np.sum(spread)),
                mass=mass,
            )
        )
    return clusters


def _sign_separation(v: np.ndarray, times: np.ndarray, threshold: float) -> float:
    peak = float(np.max(np.abs(v)))
    if peak == 0.0:
        return float("inf")
    positive = times[v > threshold * peak]
    negative = times[v < -threshold * peak]
    if positive.size == 0 or negative.size == 0:
        return float("inf")
    return float(np.min(np.abs(positive[:, None] - negative[None, :])))


def _is_monotone(gammas: np.ndarray, values: np.ndarray) -> bool:
    order = np.argsort(gammas)
    return bool(np.all(np.diff(values[order]) >= -_SHAPE_SLACK))


def _is_concave(gammas: np.ndarray, values: np.ndarray) -> bool:
    if gammas.size < 3:
        return True
    order = np.argsort(gammas)
    slopes = np.diff(values[order]) / np.diff(gammas[order])
    scale = max(1.0, float(np.max(np.abs(slopes))))
    return bool(np.all(np.diff(slopes) <= _SHAPE_SLACK * scale))


def diagnostics(
        data: ProblemData,
        reports: Sequence[SolveReport],
        dc: DerivativeControl,
        exact_control: Optional[ExactControl] = None,
        exact_cost: Optional[float] = None,
        delta: float = 1e-2,
        separation_threshold: float = 1e-3,
) -> Diagnostics:
    """
    Report on a completed path run

    :param data: the problem
    :param reports: stage reports in path order
    :param dc: the final control
    :param exact_control: known optimal control, if any
    :param exact_cost: known optimal cost J, if any
    :param delta: sparsity is measured on {|psi_j| < alpha_j (1 - delta)}
    :param separation_threshold: relative cut-off for the sign supports of v
    """
    grid = data.geometry
    tau = grid.tau
    gammas = np.array([report.gamma for report in reports])
    values = np.array([report.value for report in reports])
    closed_form = np.array([report.value_derivative for report in reports])
    fd = np.gradient(values, gammas) if gammas.size >= 2 else closed_form.copy()

    cost_gaps = None
    gap_constant = None
    if exact_cost is not None and gammas.size:
        gaps = values - exact_cost
        cost_gaps = tuple(float(gap) for gap in gaps)
        smallest = np.argsort(gammas)[:_GAP_STAGES]
        gap_constant = float(np.max(gaps[smallest] / gammas[smallest]))

    adjoint = compute_adjoint_functional(data, dc)
    alpha = data.alpha
    abs_v = np.abs(dc.v)
    quiet = np.abs(adjoint.psi) < (alpha * (1.0 - delta))[:, None]
    sparsity = integrate(abs_v * quiet, tau)
    sup_ratio = np.max(np.abs(adjoint.psi), axis=1) / alpha
    separation = [_sign_separation(row, grid.times, separation_threshold) for row in dc.v]
    variation = integrate(abs_v, tau)

    l1_error = None
    tv_gap = None
    if exact_control is not None:
        exact_values = evaluate_exact_control(exact_control, grid)
        l1_error = tuple(float(err) for err in integrate(np.abs(control_values(dc, tau) - exact_values), tau))
        tv_gap = tuple(float(gap) for gap in np.abs(variation - total_variation(exact_control)))

    result = Diagnostics(
        gammas=tuple(float(g) for g in gammas),
        values=tuple(float(val) for val in values),
        value_derivatives=tuple(float(val) for val in closed_form),
        value_derivatives_fd=tuple(float(val) for val in fd),
        monotone=_is_monotone(gammas, values),
        concave=_is_concave(gammas, values),
        cost_gaps=cost_gaps,
        cost_gap_constant=gap_constant,
        sparsity_mass=tuple(float(val) for val in sparsity),
        sup_norm_ratio=tuple(float(val) for val in sup_ratio),
        sign_separation=tuple(separation),
        total_variation=tuple(float(val) for val in variation),
        l1_error=l1_error,
        tv_gap=tv_gap,
    )
    if not result.monotone or not result.concave:
        logger.warning("Value function samples: monotone=%s, concave=%s", result.monotone, result.concave)
    return result
