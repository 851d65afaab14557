"""
Tensor-product space mesh plus uniform time grid.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from bvwave.core._errors import ValidationError
from bvwave.helpers.quadrature import trapezoid_weights


logger = logging.getLogger(__name__)


def _fail(message: str) -> None:
    logger.error(message)
    raise ValidationError(message)


@dataclass(frozen=True)
class Grid:
    """
    Box-shaped space mesh with uniform per-axis spacing and a uniform time grid on [0, T]

    Space nodes are numbered in C order over the axes (axis 0 slowest).
    """

    dim: int
    space_lo: Tuple[float, ...]
    space_hi: Tuple[float, ...]
    nx: Tuple[int, ...]
    T: float
    nt: int

    def __post_init__(self) -> None:
        for name in ("space_lo", "space_hi"):
            object.__setattr__(self, name, tuple(float(val) for val in getattr(self, name)))
        object.__setattr__(self, "nx", tuple(int(val) for val in self.nx))
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "nt", int(self.nt))

        if self.dim not in (1, 2, 3):
            _fail(f"Grid dimension must be 1, 2 or 3, got {self.dim}")
        if not len(self.space_lo) == len(self.space_hi) == len(self.nx) == self.dim:
            _fail(f"Grid bounds and node counts need {self.dim} entries each")
        if any(count < 2 for count in self.nx):
            _fail(f"Every axis needs at least 2 nodes, got nx={self.nx}")
        if self.nt < 3:
            _fail(f"At least 3 time nodes are required, got nt={self.nt}")
        if not (np.isfinite(self.T) and self.T > 0.0):
            _fail(f"Final time must be positive, got T={self.T}")
        if any(not hi > lo for lo, hi in zip(self.space_lo, self.space_hi)):
            _fail(f"Degenerate box: lo={self.space_lo}, hi={self.space_hi}")

    @classmethod
    def box(cls, lo: float, hi: float, nx: Sequence[int], T: float, nt: int) -> "Grid":
        """Same bounds on every axis"""
        dim = len(nx)
        return cls(dim, (lo,) * dim, (hi,) * dim, tuple(nx), T, nt)

    @property
    def tau(self) -> float:
        return self.T / (self.nt - 1)

    @property
    def hx(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / (count - 1) for lo, hi, count in zip(self.space_lo, self.space_hi, self.nx))

    @property
    def n_space(self) -> int:
        return int(np.prod(self.nx))

    @property
    def volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in zip(self.space_lo, self.space_hi)]))

    @cached_property
    def times(self) -> np.ndarray:
        """t_i = i * tau; the last node is pinned to T"""
        times = np.arange(self.nt, dtype=np.float64) * self.tau
        times[-1] = self.T
        times.flags.writeable = False
        return times

    @cached_property
    def time_weights(self) -> np.ndarray:
        weights = trapezoid_weights(self.nt, self.tau)
        weights.flags.writeable = False
        return weights

    @cached_property
    def axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(
            np.linspace(lo, hi, count) for lo, hi, count in zip(self.space_lo, self.space_hi, self.nx)
        )

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape (n_space, dim)"""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        coords = np.stack([axis.ravel() for axis in mesh], axis=-1)
        coords.flags.writeable = False
        return coords

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        """True on nodes of the box boundary"""
        flags = [np.zeros(count, dtype=bool) for count in self.nx]
        for flag in flags:
            flag[0] = flag[-1] = True
        mesh = np.meshgrid(*flags, indexing="ij")
        mask = np.logical_or.reduce([axis.ravel() for axis in mesh])
        mask.flags.writeable = False
        return mask

    def nearest_time_index(self, t: float) -> int:
        return int(np.clip(np.rint(t / self.tau), 0, self.nt - 1))

    def refined(self) -> "Grid":
        """Halve tau and every hx"""
        return Grid(
            self.dim,
            self.space_lo,
            self.space_hi,
            tuple(2 * count - 1 for count in self.nx),
            self.T,
            2 * self.nt - 1,
        )
