""" Batch command line, run configuration and CSV artifacts """

from bvwave.cli.config import RunConfig, parse_config
from bvwave.cli.csv_io import format_cell, read_csv, write_columns, write_csv
from bvwave.cli.runner import RunResult, build_problem, run, write_artifacts
