""" Tests for grids, fields and parameters """

import numpy as np
import pytest

from bvwave.core import (
    DerivativeControl,
    Grid,
    ProblemData,
    RegularizationParams,
    SpaceTimeField,
    ValidationError,
)


def test_grid_spacings(square_grid):
    assert square_grid.tau == pytest.approx(0.1)
    assert square_grid.hx == pytest.approx((1.0 / 3.0, 0.25))
    assert square_grid.n_space == 63
    assert square_grid.volume == pytest.approx(4.0)
    assert square_grid.times[-1] == 1.0


def test_grid_coordinates_are_c_ordered(square_grid):
    coords = square_grid.coordinates
    assert coords.shape == (63, 2)
    assert coords[0].tolist() == [-1.0, -1.0]
    assert coords[1].tolist() == [-1.0, -0.75]
    assert coords[9].tolist() == pytest.approx([-1.0 + 1.0 / 3.0, -1.0])


def test_boundary_mask(square_grid):
    mask = square_grid.boundary_mask.reshape(7, 9)
    assert mask[0].all() and mask[-1].all() and mask[:, 0].all() and mask[:, -1].all()
    assert not mask[1:-1, 1:-1].any()


def test_grid_refinement(toy_grid):
    fine = toy_grid.refined()
    assert fine.nx == (17,)
    assert fine.nt == 33
    assert fine.tau == pytest.approx(toy_grid.tau / 2.0)


@pytest.mark.parametrize(
    ("kwargs", "match"),
    [
        ({"dim": 4, "space_lo": (0,) * 4, "space_hi": (1,) * 4, "nx": (3,) * 4, "T": 1.0, "nt": 5}, "dimension"),
        ({"dim": 1, "space_lo": (0,), "space_hi": (1,), "nx": (1,), "T": 1.0, "nt": 5}, "at least 2 nodes"),
        ({"dim": 1, "space_lo": (0,), "space_hi": (1,), "nx": (3,), "T": 1.0, "nt": 2}, "3 time nodes"),
        ({"dim": 1, "space_lo": (0,), "space_hi": (1,), "nx": (3,), "T": 0.0, "nt": 5}, "positive"),
        ({"dim": 1, "space_lo": (1,), "space_hi": (1,), "nx": (3,), "T": 1.0, "nt": 5}, "Degenerate"),
        ({"dim": 2, "space_lo": (0,), "space_hi": (1,), "nx": (3,), "T": 1.0, "nt": 5}, "entries"),
    ],
)
def test_invalid_grid(kwargs, match):
    with pytest.raises(ValidationError, match=match):
        Grid(**kwargs)


def test_nearest_time_index(toy_grid):
    assert toy_grid.nearest_time_index(0.0) == 0
    assert toy_grid.nearest_time_index(0.26) == 2
    assert toy_grid.nearest_time_index(5.0) == 16


def test_field_is_frozen(toy_grid):
    field = SpaceTimeField.zeros(toy_grid)
    with pytest.raises(ValueError):
        field.values[0, 0] = 1.0


def test_field_shape_and_finiteness(toy_grid):
    with pytest.raises(ValidationError):
        SpaceTimeField(np.zeros((3, 3)), toy_grid)
    values = np.zeros((toy_grid.nt, toy_grid.n_space))
    values[1, 1] = np.nan
    with pytest.raises(ValidationError, match="non-finite"):
        SpaceTimeField(values, toy_grid)


def test_field_arithmetic(toy_grid, rng):
    first = SpaceTimeField(rng.standard_normal((17, 9)), toy_grid)
    second = SpaceTimeField(rng.standard_normal((17, 9)), toy_grid)
    assert np.allclose((first + second - second).values, first.values)
    assert np.allclose(first.scaled(2.0).values, 2.0 * first.values)
    assert np.array_equal(first.time_flipped().values, first.values[::-1])


def test_derivative_control_vector_round_trip(rng):
    control = DerivativeControl(rng.standard_normal((2, 5)), rng.standard_normal(2))
    again = DerivativeControl.from_vector(control.as_vector(), 2, 5)
    assert np.array_equal(again.v, control.v)
    assert np.array_equal(again.c, control.c)
    assert control.m == 2 and control.nt == 5


def test_derivative_control_shape_mismatch():
    with pytest.raises(ValidationError):
        DerivativeControl(np.zeros((2, 5)), np.zeros(3))


def test_problem_data_validation(toy_grid):
    zero = np.zeros(toy_grid.n_space)
    yd = SpaceTimeField.zeros(toy_grid)
    g = np.zeros((1, toy_grid.n_space))
    g[0, 4] = 1.0
    with pytest.raises(ValidationError, match="alpha"):
        ProblemData(toy_grid, g, np.array([0.0]), zero, zero, yd)
    with pytest.raises(ValidationError, match="nonzero"):
        ProblemData(toy_grid, np.zeros((1, toy_grid.n_space)), np.array([1.0]), zero, zero, yd)
    overlapping = np.zeros((2, toy_grid.n_space))
    overlapping[:, 4] = 1.0
    with pytest.raises(ValidationError, match="disjoint"):
        ProblemData(toy_grid, overlapping, np.array([1.0, 1.0]), zero, zero, yd)


@pytest.mark.parametrize(
    ("gamma0", "nu", "tol_gamma", "stages"),
    [
        (1.0, 0.1, 1e-8, 9),
        (1.0, 0.5, 3.8e-6, 19),
        (1.1e-3, 0.1, 1e-3, 1),
    ],
)
def test_schedule_length(gamma0, nu, tol_gamma, stages):
    params = RegularizationParams(gamma0=gamma0, nu=nu, tol_gamma=tol_gamma)
    gammas = params.schedule()
    assert len(gammas) == stages
    assert gammas[0] == gamma0


def test_kappa():
    params = RegularizationParams(c_kappa=2.0, kappa_exp=4.0)
    assert params.kappa(0.0) == 0.0
    assert params.kappa(0.5) == pytest.approx(0.125)
    assert params.kappa_prime(0.5) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "kwargs",
    [{"gamma0": 0.0}, {"nu": 1.0}, {"nu": 0.0}, {"tol_newton": -1.0}, {"c_kappa": -1.0}, {"krylov_restart": 0}],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValidationError):
        RegularizationParams(**kwargs)
