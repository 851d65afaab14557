"""
Run orchestration: build the problem, follow the path, write the artifacts.

Exit codes: 0 success, 1 artifact write failure, 2 configuration or validation error,
3 solver failure. On a solver failure the artifacts of the last completed stage are
still written and the summary is flagged.
"""

import logging
from pathlib import Path
from typing import List, NamedTuple, Optional

import numpy as np

from bvwave.control import compute_adjoint_functional, control_values
from bvwave.core import (
    BVWaveError,
    DerivativeControl,
    Diagnostics,
    EnvConfig,
    PathFollowingError,
    SolveReport,
    ValidationError,
    pin_derivative,
)
from bvwave.cli.config import RunConfig
from bvwave.cli.csv_io import atomic_write_text, write_columns, write_csv
from bvwave.helpers import CustomProblem, ProblemKind
from bvwave.problems import (
    ManufacturedProblem,
    build_cantor_example,
    build_dirac_example,
    build_zero_problem,
)
from bvwave.solver import diagnostics, jump_clusters, path_following


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ARTIFACTS = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

_AT_ALPHA_TOLERANCE = 1e-3


class RunResult(NamedTuple):
    """Outcome of :func:`run`"""

    exit_code: int
    output_dir: Path
    control: Optional[DerivativeControl]
    reports: List[SolveReport]
    diagnostics: Optional[Diagnostics]
    artifacts: List[Path]


def build_problem(config: RunConfig) -> ManufacturedProblem:
    options = config.options
    if config.problem is ProblemKind.DIRAC:
        return build_dirac_example(config.grid, l=options["l"], alpha=options["alpha"])
    if config.problem is ProblemKind.CANTOR:
        return build_cantor_example(
            config.grid, eps=options["eps"], plateaus=options["plateaus"], g_scale=options["g_scale"]
        )
    if options["custom"] is CustomProblem.ZERO:
        return build_zero_problem(config.grid, alpha=options["alpha"], m=options["m"])
    error_message = f"No builder for custom problem {options['custom']}"
    logger.error(error_message)
    raise ValidationError(error_message)


def _columns(prefix: str, m: int) -> List[str]:
    return [f"{prefix}_{j + 1}" for j in range(m)]


def write_artifacts(
        out: Path,
        problem: ManufacturedProblem,
        dc: DerivativeControl,
        reports: List[SolveReport],
        report: Optional[Diagnostics],
) -> List[Path]:
    """Write every CSV artifact of a run into ``out``"""
    data = problem.data
    grid = data.geometry
    times = grid.times
    m = data.m
    written = []

    u = control_values(dc, grid.tau)
    written.append(write_columns(out / "control.csv", ["t"] + _columns("u", m), [times, *u]))
    written.append(write_columns(out / "derivative.csv", ["t"] + _columns("v", m), [times, *dc.v]))

    adjoint = compute_adjoint_functional(data, dc)
    at_alpha = np.abs(adjoint.psi) >= (data.alpha * (1.0 - _AT_ALPHA_TOLERANCE))[:, None]
    written.append(
        write_columns(
            out / "adjoint.csv",
            ["t"] + _columns("psi", m) + _columns("at_alpha", m),
            [times, *adjoint.psi, *at_alpha.astype(np.float64)],
        )
    )

    history = []
    for stage in reports:
        for iteration, residual in enumerate(stage.residual_norms):
            krylov = stage.krylov_iterations[iteration] if iteration < len(stage.krylov_iterations) else 0
            history.append((stage.gamma, iteration, residual, krylov))
    written.append(write_csv(out / "newton_history.csv", ["gamma", "iter", "residual_norm", "krylov_iters"], history))

    value_rows = []
    for index, stage in enumerate(reports):
        fd = report.value_derivatives_fd[index] if report is not None else stage.value_derivative
        gap = report.cost_gaps[index] if report is not None and report.cost_gaps is not None else float("nan")
        cost = stage.cost
        value_rows.append(
            (stage.gamma, stage.value, cost.tracking, cost.l1, cost.h1, cost.offset,
             stage.value_derivative, fd, gap, stage.iterations, int(stage.converged))
        )
    written.append(
        write_csv(
            out / "value_function.csv",
            ["gamma", "value", "tracking", "l1", "h1", "offset",
             "value_derivative", "value_derivative_fd", "cost_gap", "newton_iters", "converged"],
            value_rows,
        )
    )

    if report is not None:
        rows = [
            (name, component + 1, value)
            for name, per_component in report.as_rows().items()
            for component, value in enumerate(per_component)
        ]
        rows.append(("monotone", 0, int(report.monotone)))
        rows.append(("concave", 0, int(report.concave)))
        if report.cost_gap_constant is not None:
            rows.append(("cost_gap_constant", 0, report.cost_gap_constant))
        written.append(write_csv(out / "diagnostics.csv", ["quantity", "component", "value"], rows))

    exact = problem.optimal.v if problem.optimal is not None else pin_derivative(problem.exact_control, grid)
    written.append(write_columns(out / "exact_derivative.csv", ["t"] + _columns("du", m), [times, *exact]))
    return written


def _summary(
        config: RunConfig,
        problem: Optional[ManufacturedProblem],
        dc: Optional[DerivativeControl],
        reports: List[SolveReport],
        report: Optional[Diagnostics],
        status: str,
) -> str:
    grid = config.grid
    lines = [
        f"problem: {config.problem.value}",
        f"status: {status}",
        f"grid: dim={grid.dim} lo={grid.space_lo} hi={grid.space_hi} nx={grid.nx} nt={grid.nt} T={grid.T}",
        f"options: {config.options}",
        f"seed: {config.seed}",
        f"stages: {len(reports)} of {len(config.params.schedule())}",
    ]
    if reports:
        last = reports[-1]
        lines += [
            f"final gamma: {last.gamma:.6e}",
            f"final residual: {last.final_residual:.6e}",
            f"final value: {last.value:.12e}",
            f"unregularized cost: {last.cost.unregularized:.12e}",
        ]
    if problem is not None and problem.exact_cost is not None:
        lines.append(f"exact cost: {problem.exact_cost:.12e}")
    if problem is not None and dc is not None:
        for j, row in enumerate(dc.v):
            clusters = jump_clusters(row, problem.grid)
            centers = ", ".join(f"{cluster.center:.6f} ({cluster.mass:+.4f})" for cluster in clusters)
            lines.append(f"jumps u_{j + 1}: {centers or 'none'}")
    if report is not None:
        lines += [
            f"value function monotone: {report.monotone}",
            f"value function concave: {report.concave}",
            f"sup-norm ratio: {report.sup_norm_ratio}",
            f"total variation: {report.total_variation}",
        ]
        if report.l1_error is not None:
            lines.append(f"L1 error: {report.l1_error}")
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> RunResult:
    """
    Execute one configured run

    :param config: the run configuration
    :return: exit code, artifact paths and the solver outputs
    """
    out = Path(config.output_dir or EnvConfig.output_dir())
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as error:
        logger.error("Output directory %s is not writable: %s", out, error)
        return RunResult(EXIT_CONFIG, out, None, [], None, [])

    try:
        problem = build_problem(config)
    except ValidationError as error:
        logger.error("Problem construction failed: %s", error.message)
        summary = _summary(config, None, None, [], None, f"invalid problem: {error.message}")
        path = atomic_write_text(out / "summary.txt", summary)
        return RunResult(EXIT_CONFIG, out, None, [], None, [path])

    exit_code = EXIT_OK
    status = "completed"
    try:
        dc, reports = path_following(problem.data, config.params)
    except PathFollowingError as error:
        exit_code = EXIT_SOLVER
        status = f"aborted (partial artifacts): {error.message}"
        dc = error.last_control
        reports = error.reports
    except BVWaveError as error:
        logger.error("Run failed: %s", error.message)
        summary = _summary(config, problem, None, [], None, f"failed: {error.message}")
        path = atomic_write_text(out / "summary.txt", summary)
        return RunResult(error.exit_code, out, None, [], None, [path])

    report = None
    if reports:
        report = diagnostics(problem.data, reports, dc, problem.exact_control, problem.exact_cost)
    try:
        artifacts = write_artifacts(out, problem, dc, reports, report)
        artifacts.append(
            atomic_write_text(out / "summary.txt", _summary(config, problem, dc, reports, report, status))
        )
    except BVWaveError as error:
        logger.error("Writing the artifacts failed: %s", error.message)
        return RunResult(EXIT_ARTIFACTS, out, dc, list(reports), report, [])
    logger.info("Run %s; artifacts in %s", status, out)
    return RunResult(exit_code, out, dc, list(reports), report, artifacts)
