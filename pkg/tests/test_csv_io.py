""" Tests for the CSV artifacts """

import numpy as np
import pytest

from bvwave.cli.csv_io import atomic_write_text, format_cell, read_csv, write_columns, write_csv
from bvwave.core import BVWaveError


def test_format_cell():
    assert format_cell(True) == "1"
    assert format_cell(np.int64(4)) == "4"
    assert format_cell("monotone") == "monotone"
    assert format_cell(float("inf")) == "inf"


def test_columns_reload_bit_for_bit(tmp_path, rng):
    columns = [np.linspace(0.0, 2.0, 33), rng.standard_normal(33), rng.standard_normal(33) * 1e-300]
    path = write_columns(tmp_path / "control.csv", ["t", "u_1", "u_2"], columns)
    header, table = read_csv(path)
    assert header == ["t", "u_1", "u_2"]
    assert np.array_equal(table, np.column_stack(columns))


def test_line_endings_and_no_leftovers(tmp_path):
    path = write_csv(tmp_path / "history.csv", ["gamma", "iter"], [(0.1, 1), (0.01, 2)])
    assert path.read_bytes() == b"gamma,iter\n0.10000000000000001,1\n0.01,2\n"
    assert [item.name for item in tmp_path.iterdir()] == ["history.csv"]


def test_header_only_table(tmp_path):
    header, table = read_csv(write_csv(tmp_path / "empty.csv", ["gamma", "value"], []))
    assert header == ["gamma", "value"]
    assert table.shape == (0, 2)


def test_row_length_is_checked(tmp_path):
    with pytest.raises(BVWaveError, match="does not match"):
        write_csv(tmp_path / "bad.csv", ["a", "b"], [(1.0,)])


def test_overwrite_is_atomic(tmp_path):
    path = atomic_write_text(tmp_path / "summary.txt", "first\n")
    atomic_write_text(path, "second\n")
    assert path.read_text() == "second\n"
    assert len(list(tmp_path.iterdir())) == 1


def test_unwritable_target(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises((BVWaveError, OSError)):
        atomic_write_text(blocker / "summary.txt", "text")


def test_column_count_is_checked(tmp_path):
    with pytest.raises(BVWaveError, match="do not match"):
        write_columns(tmp_path / "bad.csv", ["t"], [np.zeros(3), np.ones(3)])
    assert not list(tmp_path.iterdir())


def test_failed_replace_leaves_no_temporary(tmp_path):
    (tmp_path / "control.csv").mkdir()
    with pytest.raises(BVWaveError, match="Could not write") as error:
        write_columns(tmp_path / "control.csv", ["t"], [np.zeros(3)])
    assert error.value.error_code == "artifact_write_failed"
    assert [item.name for item in tmp_path.iterdir()] == ["control.csv"]
