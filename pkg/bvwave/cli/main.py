"""
Command line entry point

    bvwave dirac --config run.cfg --out results --override grid.nt=513
"""

import argparse
import dataclasses
import logging
from pathlib import Path
from typing import List, Optional

from bvwave.cli.config import parse_config
from bvwave.cli.runner import EXIT_CONFIG, run
from bvwave.core import ConfigError, EnvConfig
from bvwave.helpers import ProblemKind


logger = logging.getLogger(__name__)

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvwave",
        description="BV-in-time optimal control of the wave equation by H1 path following",
    )
    subcommands = parser.add_subparsers(dest="problem", required=True, metavar="problem")
    for kind in ProblemKind:
        sub = subcommands.add_parser(kind.value, help=f"run the {kind.value} problem")
        sub.add_argument("--config", type=Path, default=None, help="key=value config file")
        sub.add_argument("--out", type=Path, default=None, help="artifact directory")
        sub.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
        sub.add_argument(
            "--log-level",
            default=None,
            choices=["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"],
            help="logging level (default: BVWAVE_LOG_LEVEL or INFO)",
        )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, configure logging and run

    :return: process exit code
    """
    args = build_parser().parse_args(argv)
    try:
        level = args.log_level or EnvConfig.log_level()
    except ConfigError as error:
        logging.basicConfig(level=logging.INFO, format=_LOG_FORMAT)
        logger.error("%s", error.message)
        return EXIT_CONFIG
    logging.basicConfig(level=getattr(logging, level), format=_LOG_FORMAT)

    try:
        config = parse_config(args.problem, args.config, args.override)
    except ConfigError as error:
        return error.exit_code

    output_dir = args.out or config.output_dir or Path(EnvConfig.output_dir())
    return run(dataclasses.replace(config, output_dir=output_dir)).exit_code
