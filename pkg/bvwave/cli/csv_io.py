"""
CSV artifacts: header row, comma separated, UTF-8, LF line endings, floats with 17
significant digits so that a reload reproduces the arrays bit for bit. Files are
written to a temporary sibling and renamed into place.
"""

import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from bvwave.core import BVWaveError


logger = logging.getLogger(__name__)

Cell = Union[int, float, str, np.integer, np.floating, bool]

_FLOAT_FORMAT = "%.17g"


def format_cell(value: Cell) -> str:
    """
    >>> format_cell(0.1)
    '0.10000000000000001'
    >>> format_cell(3)
    '3'
    """
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return _FLOAT_FORMAT % float(value)


@contextmanager
def _atomic_stream(path: Path) -> Iterator[IO[str]]:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temporary = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            yield stream
        os.replace(temporary, path)
    except OSError as error:
        if os.path.exists(temporary):
            os.remove(temporary)
        error_message = f"Could not write {path}: {error}"
        logger.error(error_message)
        raise BVWaveError(error_message, error_code="artifact_write_failed") from error


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write ``text`` next to ``path`` and rename it into place"""
    path = Path(path)
    with _atomic_stream(path) as stream:
        stream.write(text)
    return path


def _save_table(path: Union[str, Path], header: Sequence[str], table: np.ndarray, fmt: str) -> Path:
    path = Path(path)
    with _atomic_stream(path) as stream:
        np.savetxt(stream, table, fmt=fmt, delimiter=",", newline="\n", header=",".join(header), comments="")
    logger.info("Wrote %s", path)
    return path


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> Path:
    """
    Write one artifact table with mixed cells

    :param path: target file
    :param header: column names
    :param rows: table rows, one cell per column
    """
    cells: List[List[str]] = []
    for row in rows:
        if len(row) != len(header):
            error_message = f"Row of length {len(row)} does not match the {len(header)} columns of {path}"
            logger.error(error_message)
            raise BVWaveError(error_message, error_code="artifact_write_failed")
        cells.append([format_cell(cell) for cell in row])
    table = np.array(cells, dtype=str).reshape(len(cells), len(header))
    return _save_table(path, header, table, "%s")


def write_columns(path: Union[str, Path], header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    """Write equally long 1-D arrays as the columns of a numeric table"""
    stacked = np.column_stack([np.asarray(column, dtype=np.float64) for column in columns])
    if stacked.shape[1] != len(header):
        error_message = f"{stacked.shape[1]} columns do not match the {len(header)} names of {path}"
        logger.error(error_message)
        raise BVWaveError(error_message, error_code="artifact_write_failed")
    return _save_table(path, header, stacked, _FLOAT_FORMAT)


def read_csv(path: Union[str, Path]) -> Tuple[List[str], np.ndarray]:
    """
    Reload a numeric artifact table

    :return: header and a float64 array of shape (rows, columns)
    """
    with open(path, "r", encoding="utf-8", newline="") as stream:
        lines = stream.read().splitlines()
    header = lines[0].split(",")
    if len(lines) == 1:
        return header, np.zeros((0, len(header)))
    table = np.loadtxt(lines[1:], delimiter=",", dtype=np.float64, ndmin=2)
    return header, table
