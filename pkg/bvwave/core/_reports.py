"""  Records produced by the solvers and the verification routines. """

from typing import Dict, NamedTuple, Optional, Tuple


class CostBreakdown(NamedTuple):
    """
    Terms of the regularized cost J^1_gamma
    """

    tracking: float
    l1: float
    h1: float
    offset: float

    @property
    def total(self) -> float:
        return self.tracking + self.l1 + self.h1 + self.offset

    @property
    def unregularized(self) -> float:
        """Tracking plus the alpha-weighted L1 term, the cost J of the limit problem"""
        return self.tracking + self.l1


class SolveReport(NamedTuple):
    """
    Outcome of one semi-smooth Newton solve at fixed gamma
    """

    gamma: float
    iterations: int
    residual_norms: Tuple[float, ...]
    krylov_iterations: Tuple[int, ...]
    value: float
    cost: CostBreakdown
    value_derivative: float
    wall_time: float
    converged: bool

    @property
    def final_residual(self) -> float:
        return self.residual_norms[-1]


class ManufacturedCheck(NamedTuple):
    """
    Errors of one refinement level of a manufactured problem
    """

    nt: int
    nx: Tuple[int, ...]
    adjoint_error: float
    sup_norm_excess: float
    complementarity_gap: float
    psi0: float


class Diagnostics(NamedTuple):
    """
    Structured report of a completed path run
    """

    gammas: Tuple[float, ...]
    values: Tuple[float, ...]
    value_derivatives: Tuple[float, ...]
    value_derivatives_fd: Tuple[float, ...]
    monotone: bool
    concave: bool
    cost_gaps: Optional[Tuple[float, ...]]
    cost_gap_constant: Optional[float]
    sparsity_mass: Tuple[float, ...]
    sup_norm_ratio: Tuple[float, ...]
    sign_separation: Tuple[float, ...]
    total_variation: Tuple[float, ...]
    l1_error: Optional[Tuple[float, ...]]
    tv_gap: Optional[Tuple[float, ...]]

    def as_rows(self) -> Dict[str, Tuple[float, ...]]:
        """Per-component quantities keyed by name, for serialization"""
        rows = {
            "sparsity_mass": self.sparsity_mass,
            "sup_norm_ratio": self.sup_norm_ratio,
            "sign_separation": self.sign_separation,
            "total_variation": self.total_variation,
        }
        if self.l1_error is not None:
            rows["l1_error"] = self.l1_error
        if self.tv_gap is not None:
            rows["tv_gap"] = self.tv_gap
        return rows
