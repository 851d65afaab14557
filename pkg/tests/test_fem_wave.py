""" Tests for the discrete wave equation """

import numpy as np
import pytest

from bvwave.core import Grid, SpaceTimeField, ValidationError
from bvwave.fem import FemOperators, assemble
from bvwave.problems import empirical_orders

from conftest import random_field


def test_one_interior_node_mass():
    ops = assemble(Grid.box(-1.0, 1.0, (3,), 1.0, 5))
    assert ops.mass.toarray() == pytest.approx(np.array([[2.0 / 3.0]]))
    assert ops.stiffness.toarray() == pytest.approx(np.array([[2.0]]))


@pytest.mark.parametrize("nx", [(9,), (5, 7), (3, 4, 5)])
def test_mass_and_stiffness_sums(nx):
    grid = Grid.box(-1.0, 1.0, nx, 1.0, 5)
    ops = assemble(grid)
    assert ops.mass_full.sum() == pytest.approx(grid.volume)
    assert np.allclose(ops.stiffness_full @ np.ones(grid.n_space), 0.0, atol=1e-12)
    assert abs(ops.mass_full - ops.mass_full.T).max() == 0.0
    assert abs(ops.stiffness_full - ops.stiffness_full.T).max() == 0.0
    assert np.all(np.linalg.eigvalsh(ops.mass.toarray()) > 0.0)


def test_assembly_is_cached(toy_grid):
    assert assemble(toy_grid) is assemble(Grid.box(-1.0, 1.0, (9,), 2.0, 17))


def test_no_interior_nodes():
    with pytest.raises(ValidationError, match="no interior"):
        FemOperators(Grid.box(-1.0, 1.0, (2,), 1.0, 5))


def test_unknown_linear_solver(toy_grid):
    with pytest.raises(ValidationError, match="linear solver"):
        FemOperators(toy_grid, linear_solver="multigrid")


def test_zero_data_gives_zero_state(toy_ops, toy_grid):
    state = toy_ops.solve_wave(SpaceTimeField.zeros(toy_grid))
    assert not state.values.any()
    assert not toy_ops.apply_Lstar(SpaceTimeField.zeros(toy_grid)).values.any()


def test_state_vanishes_on_boundary(square_grid, rng):
    ops = assemble(square_grid)
    y0 = rng.standard_normal(square_grid.n_space)
    state = ops.solve_wave(random_field(rng, square_grid), y0, y0)
    assert not state.values[:, square_grid.boundary_mask].any()


def test_linearity(toy_ops, toy_grid, rng):
    first = random_field(rng, toy_grid)
    second = random_field(rng, toy_grid)
    combined = toy_ops.apply_L(first + second.scaled(3.0))
    assert np.allclose(combined.values, (toy_ops.apply_L(first) + toy_ops.apply_L(second).scaled(3.0)).values)


def test_superposition_of_L_and_Q(toy_ops, toy_grid, rng):
    f = random_field(rng, toy_grid)
    y0 = rng.standard_normal(toy_grid.n_space)
    y1 = rng.standard_normal(toy_grid.n_space)
    combined = toy_ops.solve_wave(f, y0, y1)
    assert np.allclose(combined.values, (toy_ops.apply_L(f) + toy_ops.apply_Q(y0, y1)).values)


def test_cg_matches_direct(toy_grid, rng):
    f = random_field(rng, toy_grid)
    direct = assemble(toy_grid).apply_L(f)
    iterative = assemble(toy_grid, "cg").apply_L(f)
    assert np.allclose(direct.values, iterative.values, atol=1e-9)


def test_adjoint_identity(adjoint_grid, rng):
    ops = assemble(adjoint_grid)
    for _ in range(100):
        f = SpaceTimeField(rng.standard_normal((adjoint_grid.nt, adjoint_grid.n_space)), adjoint_grid)
        w = SpaceTimeField(rng.standard_normal((adjoint_grid.nt, adjoint_grid.n_space)), adjoint_grid)
        lhs = ops.inner(ops.apply_L(f), w)
        rhs = ops.inner(f, ops.apply_Lstar(w))
        scale = ops.norm(ops.apply_L(f)) * ops.norm(w)
        assert abs(lhs - rhs) <= 1e-12 * scale


def test_adjoint_identity_in_two_dimensions(square_grid, rng):
    ops = assemble(square_grid)
    f = random_field(rng, square_grid)
    w = random_field(rng, square_grid)
    lhs = ops.inner(ops.apply_L(f), w)
    rhs = ops.inner(f, ops.apply_Lstar(w))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def _backward_solve_mismatch(nt):
    grid = Grid.box(-1.0, 1.0, (33,), 2.0, nt)
    ops = assemble(grid)
    t = grid.times[:, None]
    x = grid.coordinates[:, 0][None, :]
    w = SpaceTimeField(np.sin(np.pi * t / 2.0) * np.cos(np.pi * x / 2.0), grid)
    adjoint = ops.apply_Lstar(w).values[1:]
    reversed_forward = ops.apply_L(w.time_flipped()).time_flipped().values[1:]
    return np.linalg.norm(adjoint - reversed_forward) / np.linalg.norm(reversed_forward)


def test_adjoint_is_a_backward_wave_solve():
    # the transposed start step differs from a forward start step by O(tau)
    coarse = _backward_solve_mismatch(65)
    fine = _backward_solve_mismatch(129)
    assert coarse <= 0.1
    assert fine <= 0.75 * coarse


def test_lstar_preimage(adjoint_grid, rng):
    ops = assemble(adjoint_grid)
    phi = random_field(rng, adjoint_grid)
    w, attained = ops.lstar_preimage(phi)
    assert not w.values[0].any()
    assert not w.values[:, adjoint_grid.boundary_mask].any()
    assert np.array_equal(attained.values[0], phi.values[0])
    assert np.array_equal(attained.values[2:], phi.values[2:])
    image = ops.apply_Lstar(w).values
    assert np.max(np.abs(image - attained.values)) <= 1e-8 * np.max(np.abs(attained.values))


def test_lstar_preimage_checks_the_grid(toy_ops, adjoint_grid, rng):
    with pytest.raises(ValidationError, match="grid"):
        toy_ops.lstar_preimage(random_field(rng, adjoint_grid))


def _standing_wave_error(nodes):
    grid = Grid.box(-1.0, 1.0, (nodes,), 2.0, nodes)
    ops = assemble(grid)
    x = grid.coordinates[:, 0]
    y0 = np.cos(np.pi * x / 2.0)
    y0[grid.boundary_mask] = 0.0
    state = ops.apply_Q(y0, np.zeros(grid.n_space))
    exact = SpaceTimeField(np.outer(np.cos(np.pi * grid.times / 2.0), y0), grid)
    return ops.norm(state - exact)


def test_standing_wave_converges_at_second_order():
    errors = [_standing_wave_error(nodes) for nodes in (33, 65, 129)]
    assert min(empirical_orders(errors)) >= 1.8


def test_discrete_energy_is_conserved(square_grid, rng):
    ops = assemble(square_grid)
    y0 = rng.standard_normal(square_grid.n_space)
    y1 = rng.standard_normal(square_grid.n_space)
    energy = ops.discrete_energy(ops.apply_Q(y0, y1))
    assert np.max(np.abs(energy - energy[0])) <= 1e-10 * energy[0]


def test_energy_grows_under_forcing(toy_ops, toy_grid):
    f = SpaceTimeField(np.ones((toy_grid.nt, toy_grid.n_space)), toy_grid)
    energy = toy_ops.discrete_energy(toy_ops.apply_L(f))
    assert energy[-1] > energy[0] > 0.0


def test_energy_weight_on_the_averaged_state():
    # 1/2 |dy|^2 + 1/4 (S, A S) with S = y^{n+1} + y^n is not conserved, 1/8 (S, A S) is
    grid = Grid.box(-1.0, 1.0, (33,), 2.0, 33)
    ops = assemble(grid)
    y0 = np.cos(np.pi * grid.coordinates[:, 0] / 2.0)
    y0[grid.boundary_mask] = 0.0
    state = ops.apply_Q(y0, y0)
    energy = ops.discrete_energy(state)
    interior = state.values[:, ops.interior]
    velocity = np.diff(interior, axis=0) / grid.tau
    pair_sum = interior[1:] + interior[:-1]
    kinetic = np.einsum("ni,ni->n", velocity, (ops.mass @ velocity.T).T)
    stiff = np.einsum("ni,ni->n", pair_sum, (ops.stiffness @ pair_sum.T).T)
    assert 0.5 * kinetic + 0.125 * stiff == pytest.approx(energy, rel=1e-12)
    quarter_weight = 0.5 * kinetic + 0.25 * stiff
    assert np.max(np.abs(energy - energy[0])) <= 1e-10 * energy[0]
    assert np.max(np.abs(quarter_weight - quarter_weight[0])) >= 0.1 * quarter_weight[0]
