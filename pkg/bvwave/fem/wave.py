"""
Discrete wave equation: tensor-product linear finite elements in space and the
three-level Crank-Nicolson scheme in time, with homogeneous Dirichlet conditions.

FemOperators provides the forcing-to-state map L, the initial-data-to-state map Q and
the exact transpose L* of the discrete L in the product
<y, w>_h = sum_n w_n (y^n)^T M w^n (trapezoid weights w_n).
"""

import logging
from functools import lru_cache, reduce
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from bvwave.core import Grid, SolverError, SpaceTimeField, ValidationError


logger = logging.getLogger(__name__)

_CG_RTOL = 1e-12


def _mass_1d(count: int, h: float) -> sp.csr_matrix:
    main = np.full(count, 2.0 * h / 3.0)
    main[0] = main[-1] = h / 3.0
    off = np.full(count - 1, h / 6.0)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def _stiffness_1d(count: int, h: float) -> sp.csr_matrix:
    main = np.full(count, 2.0 / h)
    main[0] = main[-1] = 1.0 / h
    off = np.full(count - 1, -1.0 / h)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def _kron_all(factors) -> sp.csr_matrix:
    return reduce(lambda left, right: sp.kron(left, right, format="csr"), factors)


class FemOperators:
    """
    Mass and stiffness matrices of the box plus the factorized Crank-Nicolson matrix

    Instances are immutable after assembly and are shared through :func:`assemble`.

    :param grid: the grid
    :param linear_solver: ``"direct"`` (sparse LU, default) or ``"cg"``
    """

    def __init__(self, grid: Grid, linear_solver: str = "direct") -> None:
        self.grid = grid
        self.linear_solver = linear_solver
        tau = grid.tau

        masses = [_mass_1d(count, h) for count, h in zip(grid.nx, grid.hx)]
        stiffnesses = [_stiffness_1d(count, h) for count, h in zip(grid.nx, grid.hx)]
        self.mass_full = _kron_all(masses)
        self.stiffness_full = reduce(
            lambda acc, term: acc + term,
            [
                _kron_all([stiffnesses[k] if k == axis else masses[k] for k in range(grid.dim)])
                for axis in range(grid.dim)
            ],
        ).tocsr()

        self.boundary_mask = grid.boundary_mask
        self.interior = np.flatnonzero(~self.boundary_mask)
        if self.interior.size == 0:
            error_message = f"Grid with nx={grid.nx} has no interior nodes"
            logger.error(error_message)
            raise ValidationError(error_message)

        index = self.interior
        self.mass = self.mass_full[index][:, index].tocsc()
        self.stiffness = self.stiffness_full[index][:, index].tocsc()
        self.system = (self.mass + 0.25 * tau ** 2 * self.stiffness).tocsc()
        self._step_matrix = (2.0 * self.mass - 0.5 * tau ** 2 * self.stiffness).tocsr()

        if linear_solver == "direct":
            try:
                self._system_solve = splu(self.system).solve
                self._mass_solve = splu(self.mass).solve
            except RuntimeError as error:
                error_message = f"Sparse factorization failed: {error}"
                logger.error(error_message)
                raise SolverError(error_message, details={"unknowns": int(index.size)}) from error
        elif linear_solver == "cg":
            self._system_solve = self._cg_solver(self.system)
            self._mass_solve = self._cg_solver(self.mass)
        else:
            error_message = f"Unknown linear solver '{linear_solver}'. Expected 'direct' or 'cg'"
            logger.error(error_message)
            raise ValidationError(error_message)

        logger.info(
            "Assembled FEM operators: dim=%d, nodes=%d, interior=%d, nt=%d",
            grid.dim, grid.n_space, index.size, grid.nt,
        )

    @staticmethod
    def _cg_solver(matrix: sp.csc_matrix) -> Callable[[np.ndarray], np.ndarray]:
        diagonal = matrix.diagonal()
        preconditioner = sp.diags(1.0 / diagonal)

        def solve(rhs: np.ndarray) -> np.ndarray:
            iterations = [0]

            def count(_xk):
                iterations[0] += 1

            solution, info = cg(matrix, rhs, rtol=_CG_RTOL, atol=0.0, M=preconditioner, callback=count)
            if info != 0:
                residual = np.linalg.norm(matrix @ solution - rhs) / max(np.linalg.norm(rhs), 1e-300)
                error_message = "Conjugate gradient did not converge in the wave time step"
                logger.error(error_message)
                raise SolverError(
                    error_message,
                    details={"info": int(info), "iterations": iterations[0], "relative_residual": float(residual)},
                )
            return solution

        return solve

    # -- helpers -----------------------------------------------------------------------

    def load(self, values: np.ndarray) -> np.ndarray:
        """Interior rows of M f for nodal forcing f of shape (..., n_space)"""
        return (self.mass_full @ np.asarray(values).T).T[..., self.interior]

    def embed(self, interior_values: np.ndarray) -> np.ndarray:
        """Extend interior values by zero boundary values"""
        interior_values = np.asarray(interior_values)
        out = np.zeros(interior_values.shape[:-1] + (self.grid.n_space,))
        out[..., self.interior] = interior_values
        return out

    def inner(self, first: SpaceTimeField, second: SpaceTimeField) -> float:
        """<y, w>_h: trapezoid in time, mass-weighted in space"""
        per_level = np.einsum("ni,ni->n", first.values, (self.mass_full @ second.values.T).T)
        return float(per_level @ self.grid.time_weights)

    def norm(self, field: SpaceTimeField) -> float:
        return float(np.sqrt(max(self.inner(field, field), 0.0)))

    # -- time stepping -----------------------------------------------------------------

    def _march(self, loads: np.ndarray, y0: np.ndarray, y1: np.ndarray) -> np.ndarray:
        tau = self.grid.tau
        nt = self.grid.nt
        states = np.zeros((nt, self.interior.size))
        states[0] = y0
        states[1] = y0 + tau * y1 + 0.5 * tau ** 2 * self._mass_solve(loads[0] - self.stiffness @ y0)
        quarter = 0.25 * tau ** 2
        for n in range(1, nt - 1):
            rhs = (
                self._step_matrix @ states[n]
                - self.system @ states[n - 1]
                + quarter * (loads[n + 1] + 2.0 * loads[n] + loads[n - 1])
            )
            states[n + 1] = self._system_solve(rhs)
        return states

    def solve_wave(
            self,
            f: SpaceTimeField,
            y0: Optional[np.ndarray] = None,
            y1: Optional[np.ndarray] = None,
    ) -> SpaceTimeField:
        """
        March the three-level scheme

        y^0 is the nodal interpolant of y0, y^1 the second-order Taylor start
        y0 + tau y1 + tau^2/2 M^{-1}(M f^0 - A y0), and for n >= 1
        M(y^{n+1} - 2y^n + y^{n-1})/tau^2 + A(y^{n+1} + 2y^n + y^{n-1})/4
        = M(f^{n+1} + 2f^n + f^{n-1})/4.

        :param f: forcing at the nodes
        :param y0: initial displacement at the nodes (zero if omitted)
        :param y1: initial velocity at the nodes (zero if omitted)
        :return: the state, zero on the boundary
        """
        n_space = self.grid.n_space
        y0 = np.zeros(n_space) if y0 is None else np.asarray(y0, dtype=np.float64)
        y1 = np.zeros(n_space) if y1 is None else np.asarray(y1, dtype=np.float64)
        if y0.shape != (n_space,) or y1.shape != (n_space,) or f.grid != self.grid:
            error_message = "Wave data do not match the grid of the operators"
            logger.error(error_message)
            raise ValidationError(error_message)
        states = self._march(self.load(f.values), y0[self.interior], y1[self.interior])
        return SpaceTimeField(self.embed(states), self.grid)

    def apply_L(self, f: SpaceTimeField) -> SpaceTimeField:
        """Forcing to state with zero initial data"""
        return self.solve_wave(f)

    def apply_Q(self, y0: np.ndarray, y1: np.ndarray) -> SpaceTimeField:
        """Initial data to state with zero forcing"""
        return self.solve_wave(SpaceTimeField.zeros(self.grid), y0, y1)

    def apply_Lstar(self, w: SpaceTimeField) -> SpaceTimeField:
        """
        Exact transpose of :meth:`apply_L` in <., .>_h

        A reverse sweep of the same three-level recursion computes the multipliers of the
        time-step equations; the (1/4, 1/2, 1/4) load averaging is then transposed and the
        result divided by the trapezoid weights.
        """
        if w.grid != self.grid:
            error_message = "Adjoint data do not match the grid of the operators"
            logger.error(error_message)
            raise ValidationError(error_message)
        tau = self.grid.tau
        last = self.grid.nt - 1
        weights = self.grid.time_weights
        sources = weights[:, None] * self.load(w.values)

        multipliers = np.zeros((last + 3, self.interior.size))
        for level in range(last, 1, -1):
            rhs = (
                sources[level]
                + self._step_matrix @ multipliers[level + 1]
                - self.system @ multipliers[level + 2]
            )
            multipliers[level] = self._system_solve(rhs)
        start = self._mass_solve(
            sources[1] + self._step_matrix @ multipliers[2] - self.system @ multipliers[3]
        )

        quarter = 0.25 * tau ** 2
        gradient = quarter * (
            multipliers[: last + 1] + 2.0 * multipliers[1: last + 2] + multipliers[2: last + 3]
        )
        gradient[0] += 0.5 * tau ** 2 * start
        return SpaceTimeField(self.embed(gradient / weights[:, None]), self.grid)

    def lstar_preimage(self, phi: SpaceTimeField) -> Tuple[SpaceTimeField, SpaceTimeField]:
        """
        A field w with L* w = phi on every time level but the second one

        The transposed load averaging is inverted from the last level down, which fixes the
        multipliers; the transposed time stepping then gives w. The second level of L* w is
        determined by the later levels, so only the attained field is returned exactly.
        w vanishes at t = 0.

        :param phi: requested image, zero on the boundary
        :return: (w, attained) with apply_Lstar(w) == attained up to rounding
        """
        if phi.grid != self.grid:
            error_message = "Adjoint data do not match the grid of the operators"
            logger.error(error_message)
            raise ValidationError(error_message)
        tau = self.grid.tau
        last = self.grid.nt - 1
        weights = self.grid.time_weights
        quarter = 0.25 * tau ** 2
        target = phi.values[:, self.interior]

        multipliers = np.zeros((last + 3, self.interior.size))
        for level in range(last, 1, -1):
            multipliers[level] = (
                weights[level] * target[level] / quarter - 2.0 * multipliers[level + 1] - multipliers[level + 2]
            )
        attained = target.copy()
        if last >= 1:
            attained[1] = quarter * (2.0 * multipliers[2] + multipliers[3]) / weights[1]
            multipliers[1] = (weights[0] * target[0] - quarter * multipliers[2]) / (0.5 * tau ** 2)

        sources = np.zeros((last + 1, self.interior.size))
        if last >= 1:
            sources[1] = (
                self.mass @ multipliers[1] - self._step_matrix @ multipliers[2] + self.system @ multipliers[3]
            )
        for level in range(2, last + 1):
            sources[level] = (
                self.system @ (multipliers[level] + multipliers[level + 2])
                - self._step_matrix @ multipliers[level + 1]
            )
        w = np.zeros_like(sources)
        for level in range(1, last + 1):
            w[level] = self._mass_solve(sources[level]) / weights[level]
        return SpaceTimeField(self.embed(w), self.grid), SpaceTimeField(self.embed(attained), self.grid)

    def discrete_energy(self, y: SpaceTimeField) -> np.ndarray:
        """
        Energy per time interval, conserved by the scheme when f = 0:
        1/2 (dy, M dy) + 1/2 (ybar, A ybar), dy = (y^{n+1} - y^n)/tau, ybar the average.
        """
        interior = y.values[:, self.interior]
        velocity = np.diff(interior, axis=0) / self.grid.tau
        average = 0.5 * (interior[1:] + interior[:-1])
        kinetic = np.einsum("ni,ni->n", velocity, (self.mass @ velocity.T).T)
        potential = np.einsum("ni,ni->n", average, (self.stiffness @ average.T).T)
        return 0.5 * kinetic + 0.5 * potential


@lru_cache(maxsize=8)
def assemble(grid: Grid, linear_solver: str = "direct") -> FemOperators:
    """
    Assemble (and cache per grid) the finite element operators

    :param grid: the grid
    :param linear_solver: ``"direct"`` or ``"cg"``
    :return: the operators
    """
    return FemOperators(grid, linear_solver)
