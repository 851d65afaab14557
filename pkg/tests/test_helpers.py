""" Tests for quadrature, the Cantor function and the mollifier """

import numpy as np
import pytest
from scipy.integrate import quad

from bvwave.core import ValidationError
from bvwave.helpers import (
    bump,
    bump_dx,
    bump_dxx,
    cantor_function,
    cumulative_trapezoid,
    cumulative_trapezoid_adjoint,
    integrate,
    mollified_plateau,
    mollified_plateau_dt,
    mollifier,
    trapezoid_weights,
)


def test_trapezoid_weights():
    assert trapezoid_weights(4, 0.5).tolist() == [0.25, 0.5, 0.5, 0.25]


def test_cumulative_trapezoid_is_exact_for_linear():
    tau = 0.25
    times = np.arange(9) * tau
    assert np.allclose(cumulative_trapezoid(2.0 * times, tau), times ** 2)


def test_cumulative_trapezoid_adjoint_identity(rng):
    tau = 0.1
    weights = trapezoid_weights(21, tau)
    for _ in range(20):
        v = rng.standard_normal(21)
        z = rng.standard_normal(21)
        lhs = np.sum(weights * cumulative_trapezoid(v, tau) * z)
        rhs = np.sum(weights * v * cumulative_trapezoid_adjoint(z, tau))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_cumulative_trapezoid_adjoint_interior_is_reverse_integral():
    tau = 0.5
    z = np.ones(5)
    adjoint = cumulative_trapezoid_adjoint(z, tau)
    assert adjoint[1:-1] == pytest.approx([1.5, 1.0, 0.5])
    assert adjoint[-1] == pytest.approx(tau / 2.0)
    assert adjoint[0] == pytest.approx(integrate(z, tau) - tau / 2.0)


@pytest.mark.parametrize(
    ("t", "expected"),
    [(0.0, 0.0), (1.0, 1.0), (1.0 / 3.0, 0.5), (0.5, 0.5), (2.0 / 3.0, 0.5), (0.25, 1.0 / 3.0), (0.75, 2.0 / 3.0)],
)
def test_cantor_function_values(t, expected):
    assert cantor_function(t) == pytest.approx(expected, abs=1e-12)


def test_cantor_function_symmetry_and_monotonicity(rng):
    t = np.sort(rng.uniform(0.0, 1.0, 500))
    values = cantor_function(t)
    assert np.all(np.diff(values) >= 0.0)
    assert np.allclose(values + cantor_function(1.0 - t), 1.0, atol=1e-9)


def test_cantor_function_is_continuous():
    t = np.linspace(0.0, 1.0 - 1e-6, 2001)
    jumps = np.abs(cantor_function(t + 1e-6) - cantor_function(t))
    assert jumps.max() < 1e-2


@pytest.mark.parametrize("t", [-0.1, 1.1, np.nan])
def test_cantor_function_domain(t):
    with pytest.raises(ValidationError):
        cantor_function(t)


def test_bump_derivatives_match_finite_differences():
    x = np.linspace(-0.9, 0.9, 37)
    step = 1e-5
    assert np.allclose(bump_dx(x), (bump(x + step) - bump(x - step)) / (2 * step), atol=1e-7)
    assert np.allclose(bump_dxx(x), (bump_dx(x + step) - bump_dx(x - step)) / (2 * step), atol=1e-6)
    assert bump(np.array([1.0, -1.5])).tolist() == [0.0, 0.0]


def test_mollifier_has_unit_mass():
    mass, _ = quad(lambda s: float(mollifier(s, 0.28)), -0.28, 0.28)
    assert mass == pytest.approx(1.0, abs=1e-9)


PLATEAUS = ((0.5, 2.0, 1.0), (3.0, 4.5, -1.0))


def test_mollified_plateau_values():
    values = mollified_plateau([0.1, 1.25, 2.5, 3.75, 4.9], 0.28, PLATEAUS, 5.0)
    assert values == pytest.approx([0.0, 1.0, 0.0, -1.0, 0.0], abs=1e-9)


def test_mollified_plateau_is_flat_inside():
    t = np.linspace(0.78, 1.72, 11)
    assert np.allclose(mollified_plateau(t, 0.28, PLATEAUS, 5.0), 1.0, atol=1e-9)
    assert np.allclose(mollified_plateau_dt(t, 0.28, PLATEAUS, 1), 0.0)


def test_mollified_plateau_derivative_integrates_to_zero():
    total, _ = quad(lambda s: float(mollified_plateau_dt(s, 0.28, PLATEAUS, 1)), 0.0, 5.0, points=[0.5, 2.0, 3.0, 4.5], limit=200)
    assert total == pytest.approx(0.0, abs=1e-8)


def test_mollified_plateau_derivative_matches_difference_quotient():
    t = np.array([0.4, 0.6, 2.1, 3.1])
    step = 1e-5
    fd = (mollified_plateau(t + step, 0.28, PLATEAUS, 5.0) - mollified_plateau(t - step, 0.28, PLATEAUS, 5.0)) / (2 * step)
    assert np.allclose(mollified_plateau_dt(t, 0.28, PLATEAUS, 1), fd, atol=1e-4)


@pytest.mark.parametrize(
    ("plateaus", "eps"),
    [
        (((0.5, 2.0, 1.0), (2.2, 4.5, -1.0)), 0.28),
        (((0.1, 2.0, 1.0),), 0.28),
        (((0.5, 4.9, 1.0),), 0.28),
        (((0.5, 2.0, 1.0),), 0.0),
        (((2.0, 0.5, 1.0),), 0.28),
    ],
)
def test_invalid_plateaus(plateaus, eps):
    with pytest.raises(ValidationError):
        mollified_plateau([1.0], eps, plateaus, 5.0)
