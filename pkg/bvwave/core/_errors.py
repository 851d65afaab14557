""" bvwave Error Messages"""

from typing import Any, Dict, List, Optional


class BVWaveError(Exception):
    """
    Base exception class for bvwave errors
    """

    def __init__(
            self,
            message: Optional[str] = None,
            error_code: Optional[str] = None,
            exit_code: int = 1,
            details: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.message = message
        self.error_code = error_code
        self.exit_code = exit_code
        self.details = details or {}

        super(BVWaveError, self).__init__(self._format_message())

    def __str__(self) -> str:
        """
        Return the error message
        """
        return self._format_message()

    def __repr__(self):
        return (f"{self.__class__.__name__}("
                f"message='{self.message}', "
                f"error_code='{self.error_code}', "
                f"exit_code={self.exit_code}, "
                f"details={self.details})")

    def _format_message(self) -> str:
        """
        Format the error message
        """
        error_msg = f"\nError Message: {self.message}"
        if self.error_code is not None:
            error_msg += f"\nError Code Message: {self.error_code}"
        if self.details:
            error_msg += f"\nDetails: {self.details}"
        return error_msg


class ValidationError(BVWaveError):
    """
    Invalid grid, control, problem data or parameter
    """
    def __init__(
            self,
            message: str,
            error_code: str = "validation_error",
            exit_code: int = 2,
    ) -> None:
        super().__init__(
            message=message, error_code=error_code, exit_code=exit_code
        )


class ConfigError(BVWaveError):
    """
    Config Error
    """
    def __init__(
            self,
            message: str,
            key: Optional[str] = None,
            error_code: str = "config_error",
            exit_code: int = 2,
    ) -> None:
        super().__init__(
            message=message,
            error_code=error_code,
            exit_code=exit_code,
            details={"key": key} if key else None,
        )
        self.key = key


class SolverError(BVWaveError):
    """
    Numerical solver failure
    """
    def __init__(
            self,
            message: str,
            error_code: str = "solver_error",
            exit_code: int = 3,
            details: Optional[Dict[str, Any]] = None,
    ) -> None:
        super().__init__(
            message=message, error_code=error_code, exit_code=exit_code, details=details
        )


class KrylovError(SolverError):
    """
    Krylov stagnation, carrying the best iterate found
    """
    def __init__(
            self,
            message: str,
            best_iterate: Any = None,
            iterations: int = 0,
            relative_residual: Optional[float] = None,
    ) -> None:
        super(KrylovError, self).__init__(
            message=message,
            error_code="krylov_stagnation",
            details={"iterations": iterations, "relative_residual": relative_residual},
        )
        self.best_iterate = best_iterate
        self.iterations = iterations


class PathFollowingError(SolverError):
    """
    Path following aborted; keeps the reports collected so far
    """
    def __init__(
            self,
            message: str,
            reports: Optional[List[Any]] = None,
            last_control: Any = None,
    ) -> None:
        super().__init__(
            message=message,
            error_code="path_following_aborted",
            details={"completed_stages": len(reports or [])},
        )
        self.reports = list(reports or [])
        self.last_control = last_control
