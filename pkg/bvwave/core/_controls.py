"""
Symbolic BV controls: jumps, Cantor pieces and absolutely continuous densities on top of
a constant offset. Ground truth for the manufactured problems.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from bvwave.core._errors import ValidationError
from bvwave.core._grid import Grid
from bvwave.helpers.cantor import cantor_function
from bvwave.helpers.tool_kit import Orientation


logger = logging.getLogger(__name__)


def _fail(message: str) -> None:
    logger.error(message)
    raise ValidationError(message)


class Atom(NamedTuple):
    """Jump of size ``weight`` at ``location``; the control includes it from there on"""

    location: float
    weight: float


class CantorPiece(NamedTuple):
    """
    Monotone Cantor staircase on [start, end]

    The rescaled argument runs over [0, fraction]: a rising piece adds
    scale * C(fraction * (t - start) / (end - start)); a falling piece adds
    scale * (C(fraction * (end - t) / (end - start)) - C(fraction)).
    """

    start: float
    end: float
    scale: float
    orientation: Orientation = Orientation.RISING
    fraction: float = 0.5

    def rise(self) -> float:
        """Signed total change of the piece"""
        total = self.scale * float(cantor_function(self.fraction))
        return total if self.orientation is Orientation.RISING else -total

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        s = np.clip((t - self.start) / (self.end - self.start), 0.0, 1.0)
        if self.orientation is Orientation.RISING:
            return self.scale * cantor_function(self.fraction * s)
        return self.scale * (cantor_function(self.fraction * (1.0 - s)) - cantor_function(self.fraction))


class DensityPiece(NamedTuple):
    """Absolutely continuous part: u' = sum_k coefficients[k] (t - start)^k on [start, end]"""

    start: float
    end: float
    coefficients: Tuple[float, ...]

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        antiderivative = Polynomial(self.coefficients).integ()
        s = np.clip(t - self.start, 0.0, self.end - self.start)
        return antiderivative(s)

    def total_variation(self) -> float:
        density = Polynomial(self.coefficients)
        width = self.end - self.start
        roots = [r.real for r in density.roots() if abs(r.imag) < 1e-12 and 0.0 < r.real < width] \
            if density.degree() > 0 else []
        cuts = [0.0] + sorted(roots) + [width]
        antiderivative = density.integ()
        return float(sum(abs(antiderivative(b) - antiderivative(a)) for a, b in zip(cuts[:-1], cuts[1:])))


@dataclass(frozen=True)
class ExactComponent:
    """One control component"""

    offset: float = 0.0
    atoms: Tuple[Atom, ...] = field(default_factory=tuple)
    cantor_pieces: Tuple[CantorPiece, ...] = field(default_factory=tuple)
    densities: Tuple[DensityPiece, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(Atom(*atom) for atom in self.atoms))
        object.__setattr__(self, "cantor_pieces", tuple(CantorPiece(*piece) for piece in self.cantor_pieces))
        object.__setattr__(self, "densities", tuple(DensityPiece(*piece) for piece in self.densities))


@dataclass(frozen=True)
class ExactControl:
    """
    Symbolic control u = (u_1, ..., u_m) on [0, T]

    :param components: one :class:`ExactComponent` per control component
    :param T: final time
    """

    components: Tuple[ExactComponent, ...]
    T: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            _fail("ExactControl needs at least one component")
        for index, component in enumerate(self.components):
            for atom in component.atoms:
                if not 0.0 < atom.location < self.T:
                    _fail(f"Atom at t={atom.location} of component {index} lies outside (0, {self.T})")
            intervals = [(p.start, p.end) for p in component.cantor_pieces]
            intervals += [(p.start, p.end) for p in component.densities]
            intervals.sort()
            for start, end in intervals:
                if not (0.0 <= start < end <= self.T):
                    _fail(f"Interval [{start}, {end}] of component {index} is degenerate or outside [0, {self.T}]")
            for (_, end), (start, _) in zip(intervals[:-1], intervals[1:]):
                if start < end:
                    _fail(f"Intervals of component {index} overlap")
            if any(not 0.0 < p.fraction <= 1.0 for p in component.cantor_pieces):
                _fail(f"Cantor piece fraction of component {index} must lie in (0, 1]")

    @classmethod
    def from_atoms(cls, atoms: Sequence[Tuple[float, float]], T: float, offset: float = 0.0) -> "ExactControl":
        return cls((ExactComponent(offset=offset, atoms=tuple(atoms)),), T)

    @property
    def m(self) -> int:
        return len(self.components)

    def evaluate_at(self, t: np.ndarray) -> np.ndarray:
        """Values at arbitrary times, shape (m, len(t))"""
        times = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.zeros((self.m, times.size))
        for j, component in enumerate(self.components):
            out[j] += component.offset
            for atom in component.atoms:
                out[j] += atom.weight * (times >= atom.location)
            for piece in component.cantor_pieces:
                out[j] += piece.evaluate(times)
            for density in component.densities:
                out[j] += density.evaluate(times)
        return out


def evaluate_exact_control(ec: ExactControl, grid: Grid) -> np.ndarray:
    """
    Sample the control at the time nodes, closed-left at atoms

    :param ec: the control
    :param grid: target grid; its horizon must match ``ec.T``
    :return: array of shape (m, nt)
    """
    if not np.isclose(grid.T, ec.T):
        _fail(f"Control horizon T={ec.T} does not match grid T={grid.T}")
    return ec.evaluate_at(grid.times)


def total_variation(ec: ExactControl) -> np.ndarray:
    """
    Total variation per component: |atoms| + Cantor rises/falls + density variation

    :return: array of shape (m,)
    """
    out = np.zeros(ec.m)
    for j, component in enumerate(ec.components):
        out[j] += sum(abs(atom.weight) for atom in component.atoms)
        out[j] += sum(abs(piece.rise()) for piece in component.cantor_pieces)
        out[j] += sum(density.total_variation() for density in component.densities)
    return out


def pin_derivative(ec: ExactControl, grid: Grid) -> np.ndarray:
    """
    Grid picture of D_t u: the increment of u over the dual cell
    [t_k - tau/2, t_k + tau/2) of node k, divided by its trapezoid weight

    An atom a*delta_t becomes a pin a/tau at the node whose cell holds it; monotone
    parts keep their sign node by node.

    :return: array of shape (m, nt)
    """
    if not np.isclose(grid.T, ec.T):
        _fail(f"Control horizon T={ec.T} does not match grid T={grid.T}")
    edges = np.concatenate(([0.0], grid.times[1:] - 0.5 * grid.tau, [grid.T]))
    values = ec.evaluate_at(edges)
    return np.diff(values, axis=1) / grid.time_weights
