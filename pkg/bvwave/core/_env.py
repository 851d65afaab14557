"""
This module retrieves the environment variables
"""
import logging
from typing import Protocol

from decouple import config

from bvwave.core._errors import ConfigError


logger = logging.getLogger(__name__)

_LOG_LEVELS = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}


class EnvBase(Protocol):
    """
    Base class for environment variables
    """
    def log_level(self) -> str:
        """
        Retrieves the logging level name

        Returns:
            str: The level name
        """

    def output_dir(self) -> str:
        """
        Retrieves the default artifact directory

        Returns:
            str: The directory
        """


class EnvConfig(EnvBase):
    """
    Config object for the environment
    """
    @classmethod
    def log_level(cls) -> str:
        level = str(config("BVWAVE_LOG_LEVEL", default="INFO")).upper()
        if level not in _LOG_LEVELS:
            error_message = f"Unsupported BVWAVE_LOG_LEVEL: {level}. Expected one of {sorted(_LOG_LEVELS)}"
            logger.error(error_message)
            raise ConfigError(error_message, key="BVWAVE_LOG_LEVEL")
        return level

    @classmethod
    def output_dir(cls) -> str:
        return config("BVWAVE_OUTPUT_DIR", default="bvwave-output")
