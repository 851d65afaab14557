""" Fixtures for testing purposes """

import numpy as np
import pytest

from bvwave.core import DerivativeControl, Grid, ProblemData, RegularizationParams, SpaceTimeField
from bvwave.fem import assemble
from bvwave.problems import box_indicator, build_dirac_example, build_zero_problem


def random_field(rng, grid):
    """Random state-shaped field, zero on the boundary"""
    values = rng.standard_normal((grid.nt, grid.n_space))
    values[:, grid.boundary_mask] = 0.0
    return SpaceTimeField(values, grid)


def random_control(rng, m, nt):
    return DerivativeControl(rng.standard_normal((m, nt)), rng.standard_normal(m))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def toy_grid():
    """ 1D toy grid used by the dense checks """
    return Grid.box(-1.0, 1.0, (9,), 2.0, 17)


@pytest.fixture
def adjoint_grid():
    return Grid.box(-1.0, 1.0, (17,), 2.0, 33)


@pytest.fixture
def square_grid():
    return Grid.box(-1.0, 1.0, (7, 9), 1.0, 11)


@pytest.fixture
def toy_ops(toy_grid):
    return assemble(toy_grid)


@pytest.fixture
def toy_data(toy_grid, rng):
    """ One control acting on [-1/2, 1/2] with random initial data and target """
    n_space = toy_grid.n_space
    y0 = rng.standard_normal(n_space)
    y1 = rng.standard_normal(n_space)
    y0[toy_grid.boundary_mask] = 0.0
    y1[toy_grid.boundary_mask] = 0.0
    return ProblemData(
        toy_grid,
        box_indicator(toy_grid, 0.5)[None, :],
        np.array([0.05]),
        y0,
        y1,
        random_field(rng, toy_grid),
    )


@pytest.fixture
def two_control_data(toy_grid):
    return build_zero_problem(toy_grid, alpha=0.5, m=2).data


@pytest.fixture
def zero_problem(toy_grid):
    return build_zero_problem(toy_grid)


@pytest.fixture
def dirac_grid():
    return Grid.box(-1.0, 1.0, (17,), 2.0, 65)


@pytest.fixture
def dirac_problem(dirac_grid):
    return build_dirac_example(dirac_grid, l=3, alpha=1.0)


@pytest.fixture
def params():
    return RegularizationParams()


@pytest.fixture
def short_path():
    """ Four stages: gamma = 1, 0.1, 0.01, 0.001 """
    return RegularizationParams(gamma0=1.0, nu=0.1, tol_gamma=1e-3)
