""" Tests for the batch runner and the command line """

import dataclasses

import numpy as np
import pytest

from bvwave.cli.config import parse_config
from bvwave.cli.csv_io import read_csv
from bvwave.cli.main import build_parser, main
from bvwave.cli.runner import EXIT_ARTIFACTS, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, run

ARTIFACTS = {
    "control.csv",
    "derivative.csv",
    "adjoint.csv",
    "newton_history.csv",
    "value_function.csv",
    "diagnostics.csv",
    "exact_derivative.csv",
    "summary.txt",
}

SMALL_CUSTOM = ["--override", "grid.nx=9", "--override", "grid.nt=17", "--override", "path.tol_gamma=0.01"]


def test_parser_lists_every_problem():
    parser = build_parser()
    args = parser.parse_args(["cantor", "--override", "grid.nt=101", "--override", "seed=3"])
    assert args.problem == "cantor"
    assert args.override == ["grid.nt=101", "seed=3"]
    with pytest.raises(SystemExit):
        parser.parse_args(["heat"])


def test_zero_problem_run(tmp_path):
    assert main(["custom", "--out", str(tmp_path)] + SMALL_CUSTOM) == EXIT_OK
    assert {item.name for item in tmp_path.iterdir()} == ARTIFACTS

    header, control = read_csv(tmp_path / "control.csv")
    assert header == ["t", "u_1"]
    assert control.shape == (17, 2)
    assert not control[:, 1].any()

    header, values = read_csv(tmp_path / "value_function.csv")
    assert header[:2] == ["gamma", "value"]
    assert values[:, 0] == pytest.approx([1.0, 0.1, 0.01])
    assert not values[:, 1].any()
    assert np.all(values[:, -1] == 1.0)

    _, history = read_csv(tmp_path / "newton_history.csv")
    assert history.shape == (3, 4)
    assert "status: completed" in (tmp_path / "summary.txt").read_text()


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("BVWAVE_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["custom"] + SMALL_CUSTOM) == EXIT_OK
    assert (tmp_path / "env" / "summary.txt").exists()


def test_config_error_exit_code(tmp_path):
    assert main(["custom", "--out", str(tmp_path), "--override", "grid.nx=9"]) == EXIT_CONFIG
    assert main(["custom", "--out", str(tmp_path), "--override", "problem.l=3"] + SMALL_CUSTOM) == EXIT_CONFIG
    assert not list(tmp_path.iterdir())


def test_invalid_problem_exit_code(tmp_path):
    config = parse_config("custom", overrides=["grid.nx=9", "grid.nt=17", "problem.m=20"])
    result = run(dataclasses.replace(config, output_dir=tmp_path))
    assert result.exit_code == EXIT_CONFIG
    assert "invalid problem" in (tmp_path / "summary.txt").read_text()


def test_solver_failure_keeps_partial_artifacts(tmp_path):
    code = main(
        [
            "dirac", "--out", str(tmp_path),
            "--override", "grid.dim=1", "--override", "grid.nx=9", "--override", "grid.nt=33",
            "--override", "newton.tol=1e-300", "--override", "newton.max_iter=1",
        ]
    )
    assert code == EXIT_SOLVER
    assert "aborted (partial artifacts)" in (tmp_path / "summary.txt").read_text()
    _, values = read_csv(tmp_path / "value_function.csv")
    assert values.shape[0] == 1
    assert values[0, -1] == 0.0
    _, history = read_csv(tmp_path / "newton_history.csv")
    assert history.shape[0] == 2


def test_dirac_run(tmp_path):
    config = parse_config(
        "dirac",
        overrides={"grid.dim": 1, "grid.nx": 17, "grid.nt": 65, "path.tol_gamma": 1e-4, "output.dir": tmp_path},
    )
    result = run(config)
    assert result.exit_code == EXIT_OK
    assert len(result.reports) == 5
    assert result.diagnostics.cost_gaps is not None
    header, adjoint = read_csv(tmp_path / "adjoint.csv")
    assert header == ["t", "psi_1", "at_alpha_1"]
    assert set(np.unique(adjoint[:, 2])) <= {0.0, 1.0}
    summary = (tmp_path / "summary.txt").read_text()
    assert "exact cost:" in summary
    assert "jumps u_1:" in summary

    _, control = read_csv(tmp_path / "control.csv")
    plateaus = np.interp([2.0 / 3.0, 4.0 / 3.0, 1.9], control[:, 0], control[:, 1])
    assert plateaus == pytest.approx([1.0, 0.0, 1.0], abs=0.1)


def test_rerun_writes_identical_artifacts(tmp_path):
    arguments = [
        "dirac", "--override", "grid.dim=1", "--override", "grid.nx=9", "--override", "grid.nt=33",
        "--override", "path.tol_gamma=0.01",
    ]
    assert main(arguments + ["--out", str(tmp_path / "first")]) == EXIT_OK
    assert main(arguments + ["--out", str(tmp_path / "second")]) == EXIT_OK
    for name in ARTIFACTS:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes(), name


def test_artifact_write_failure_exit_code(tmp_path):
    (tmp_path / "control.csv").mkdir()
    assert main(["custom", "--out", str(tmp_path)] + SMALL_CUSTOM) == EXIT_ARTIFACTS
    assert not (tmp_path / "summary.txt").exists()
    assert not list(tmp_path.glob(".*.tmp"))
