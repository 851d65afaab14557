"""
Enums for problem selection and control construction with predefined values.
"""

from enum import Enum


class Orientation(Enum):
    """Direction in which a Cantor piece moves the control."""

    RISING = "rising"
    FALLING = "falling"


class ProblemKind(Enum):
    """Problem families the batch runner knows how to build."""

    DIRAC = "dirac"
    CANTOR = "cantor"
    CUSTOM = "custom"


class CustomProblem(Enum):
    """Built-in custom problems."""

    ZERO = "zero"
