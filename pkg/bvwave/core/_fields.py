"""
Value types shared by every numerical module: space-time fields, derivative controls,
problem data and regularization parameters.

All arrays are copied to float64 and frozen on construction.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from bvwave.core._errors import ValidationError
from bvwave.core._grid import Grid


logger = logging.getLogger(__name__)


def _fail(message: str) -> None:
    logger.error(message)
    raise ValidationError(message)


def _frozen(values, shape=None, name: str = "array") -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if shape is not None and array.shape != shape:
        _fail(f"{name} must have shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        _fail(f"{name} contains non-finite entries")
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """
    Nodal values over (time level, space node)
    """

    values: np.ndarray
    grid: Grid

    def __post_init__(self) -> None:
        shape = (self.grid.nt, self.grid.n_space)
        object.__setattr__(self, "values", _frozen(self.values, shape, "SpaceTimeField.values"))

    @classmethod
    def zeros(cls, grid: Grid) -> "SpaceTimeField":
        return cls(np.zeros((grid.nt, grid.n_space)), grid)

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return SpaceTimeField(self.values + other.values, self.grid)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return SpaceTimeField(self.values - other.values, self.grid)

    def scaled(self, factor: float) -> "SpaceTimeField":
        return SpaceTimeField(factor * self.values, self.grid)

    def time_flipped(self) -> "SpaceTimeField":
        return SpaceTimeField(self.values[::-1], self.grid)


@dataclass(frozen=True, eq=False)
class DerivativeControl:
    """
    The pair (v, c): time-node samples of the control derivative and the offsets u(0)
    """

    v: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        v = np.atleast_2d(np.asarray(self.v, dtype=np.float64))
        c = np.atleast_1d(np.asarray(self.c, dtype=np.float64))
        if v.ndim != 2 or c.ndim != 1 or v.shape[0] != c.shape[0]:
            _fail(f"DerivativeControl needs v of shape (m, nt) and c of shape (m,), got {v.shape}, {c.shape}")
        object.__setattr__(self, "v", _frozen(v, name="DerivativeControl.v"))
        object.__setattr__(self, "c", _frozen(c, name="DerivativeControl.c"))

    @classmethod
    def zeros(cls, m: int, nt: int) -> "DerivativeControl":
        return cls(np.zeros((m, nt)), np.zeros(m))

    @classmethod
    def from_vector(cls, vector: np.ndarray, m: int, nt: int) -> "DerivativeControl":
        return cls(vector[: m * nt].reshape(m, nt), vector[m * nt:])

    @property
    def m(self) -> int:
        return self.v.shape[0]

    @property
    def nt(self) -> int:
        return self.v.shape[1]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.v.ravel(), self.c])

    def __add__(self, other: "DerivativeControl") -> "DerivativeControl":
        return DerivativeControl(self.v + other.v, self.c + other.c)


@dataclass(frozen=True, eq=False)
class ProblemData:
    """
    Data of the tracking problem: shape functions, weights, initial data and target state

    :param geometry: the grid
    :param g: nodal samples of the shape functions, shape (m, n_space)
    :param alpha: positive weights, shape (m,)
    :param y0: initial displacement at the nodes
    :param y1: initial velocity at the nodes
    :param yd: desired state
    """

    geometry: Grid
    g: np.ndarray
    alpha: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    yd: SpaceTimeField

    def __post_init__(self) -> None:
        n_space = self.geometry.n_space
        g = np.atleast_2d(np.asarray(self.g, dtype=np.float64))
        object.__setattr__(self, "g", _frozen(g, (g.shape[0], n_space), "ProblemData.g"))
        object.__setattr__(self, "alpha", _frozen(np.atleast_1d(self.alpha), (g.shape[0],), "ProblemData.alpha"))
        object.__setattr__(self, "y0", _frozen(self.y0, (n_space,), "ProblemData.y0"))
        object.__setattr__(self, "y1", _frozen(self.y1, (n_space,), "ProblemData.y1"))
        if self.yd.grid != self.geometry:
            _fail("ProblemData.yd lives on a different grid")
        if np.any(self.alpha <= 0.0):
            _fail(f"All alpha must be positive, got {self.alpha.tolist()}")
        supports = self.g != 0.0
        if np.any(~supports.any(axis=1)):
            _fail("Every shape function g_j must be nonzero somewhere")
        if np.any(supports.sum(axis=0) > 1):
            _fail("Shape functions g_j must have pairwise disjoint supports")

    @property
    def m(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True)
class RegularizationParams:
    """
    Parameters of the H1 regularization and of the path following loop

    kappa(gamma) = c_kappa * gamma ** kappa_exp, so kappa(0) = 0.
    """

    gamma0: float = 1.0
    nu: float = 0.1
    tol_gamma: float = 1e-8
    tol_newton: float = 1e-6
    c_kappa: float = 1.0
    kappa_exp: float = 4.0
    max_newton_iters: int = 50
    krylov_tol: float = 1e-10
    krylov_max_iter: int = 2000
    krylov_restart: int = 50

    def __post_init__(self) -> None:
        if not self.gamma0 > 0.0:
            _fail(f"gamma0 must be positive, got {self.gamma0}")
        if not 0.0 < self.nu < 1.0:
            _fail(f"nu must lie in (0, 1), got {self.nu}")
        for name in ("tol_gamma", "tol_newton", "krylov_tol", "kappa_exp"):
            if not getattr(self, name) > 0.0:
                _fail(f"{name} must be positive, got {getattr(self, name)}")
        if self.c_kappa < 0.0:
            _fail(f"c_kappa must be non-negative, got {self.c_kappa}")
        for name in ("max_newton_iters", "krylov_max_iter", "krylov_restart"):
            if int(getattr(self, name)) < 1:
                _fail(f"{name} must be at least 1, got {getattr(self, name)}")

    def kappa(self, gamma: float) -> float:
        return self.c_kappa * gamma ** self.kappa_exp

    def kappa_prime(self, gamma: float) -> float:
        return self.c_kappa * self.kappa_exp * gamma ** (self.kappa_exp - 1.0)

    def schedule(self) -> List[float]:
        """gamma_k = gamma0 * nu**k for every gamma_k >= tol_gamma (relative slack 1e-9)"""
        gammas: List[float] = []
        gamma = self.gamma0
        threshold = self.tol_gamma * (1.0 - 1e-9)
        while gamma >= threshold:
            gammas.append(gamma)
            gamma *= self.nu
        return gammas


@dataclass(frozen=True)
class ProblemMetadata:
    """Free-form description of how a problem was built"""

    name: str
    parameters: dict = field(default_factory=dict)
    note: Optional[str] = None
