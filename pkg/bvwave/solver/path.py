"""
Path following in the regularization parameter: gamma_k = gamma0 * nu**k down to
tol_gamma, each Newton solve warm-started from the previous stage.
"""

import logging
from typing import Callable, List, Optional, Tuple

from bvwave.core import (
    DerivativeControl,
    PathFollowingError,
    ProblemData,
    RegularizationParams,
    SolveReport,
    SolverError,
)
from bvwave.solver.newton import semismooth_newton


logger = logging.getLogger(__name__)


def schedule(params: RegularizationParams) -> List[float]:
    """
    The gamma values visited by :func:`path_following`

    >>> len(schedule(RegularizationParams(gamma0=1.0, nu=0.1, tol_gamma=1e-8)))
    9
    """
    return params.schedule()


def path_following(
        data: ProblemData,
        params: RegularizationParams,
        start: Optional[DerivativeControl] = None,
        on_stage: Optional[Callable[[SolveReport], None]] = None,
        abort_on_stall: bool = True,
) -> Tuple[DerivativeControl, List[SolveReport]]:
    """
    Run the outer homotopy loop

    :param data: the problem
    :param params: regularization, schedule and solver parameters
    :param start: initial control for the first stage (zero if omitted)
    :param on_stage: called with each finished stage report
    :param abort_on_stall: stop when a stage hits the Newton iteration cap
    :raise PathFollowingError: on inner failure; carries the reports and the last control
    :return: the control of the last stage and one report per stage
    """
    if params.c_kappa == 0.0:
        logger.warning("kappa is identically zero: invertibility of the Newton derivative is not guaranteed")
    iterate = start if start is not None else DerivativeControl.zeros(data.m, data.geometry.nt)
    reports: List[SolveReport] = []
    gammas = schedule(params)
    logger.info("Path following over %d stages, gamma from %.3e to %.3e", len(gammas), gammas[0], gammas[-1])

    for stage, gamma in enumerate(gammas):
        try:
            candidate, report = semismooth_newton(data, params, gamma, iterate)
        except SolverError as error:
            error_message = f"Newton solve failed at stage {stage} (gamma={gamma:.3e}): {error.message}"
            logger.error(error_message)
            raise PathFollowingError(error_message, reports=reports, last_control=iterate) from error

        iterate = candidate
        reports.append(report)
        if on_stage is not None:
            on_stage(report)
        logger.info(
            "Stage %d done: gamma=%.3e, %d Newton iterations, V=%.10e, %.2fs",
            stage, gamma, report.iterations, report.value, report.wall_time,
        )
        if not report.converged and abort_on_stall:
            error_message = (
                f"Newton did not converge at stage {stage} (gamma={gamma:.3e}), "
                f"|F|={report.final_residual:.3e}"
            )
            logger.error(error_message)
            raise PathFollowingError(error_message, reports=reports, last_control=iterate)

    return iterate, reports
