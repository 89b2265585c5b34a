import numpy as np
import pytest

from veckin.errors import DomainError, ShapeError
from veckin.services.conservation_laws import ShallowWater
from veckin.services.grid import Grid, field_from_interior
from veckin.services.kinetic import (
  LAMBDA_MIN,
  KineticField,
  build_velocity_set,
  chi_potential,
  kinetic_entropy,
  lambda_bound,
  maxwellian,
  moments,
  positivity_margin,
  project,
)

from .conftest import fd_jacobian, sw_states


def test_velocity_set_1d():
  vset = build_velocity_set(1, 2.0)
  np.testing.assert_array_equal(vset.v[:, 0], [2.0, -2.0])
  np.testing.assert_array_equal(vset.a, [0.5, 0.5])
  np.testing.assert_array_equal(vset.b[:, 0], [0.25, -0.25])
  assert vset.M == 2


def test_velocity_set_2d():
  vset = build_velocity_set(2, 1.0)
  assert vset.M == 4
  np.testing.assert_array_equal(vset.b[:, 0], [0.5, 0.0, -0.5, 0.0])
  np.testing.assert_array_equal(vset.b[:, 1], [0.0, 0.5, 0.0, -0.5])
  assert vset.v[:, 0] @ vset.b[:, 0] == 1.0


@pytest.mark.parametrize("D", [1, 2])
def test_velocity_set_moment_constraints(D, rng):
  eps = np.finfo(float).eps
  for lam in rng.uniform(1e-3, 1e3, 50):
    vset = build_velocity_set(D, lam)
    assert abs(vset.a.sum() - 1.0) <= 4 * eps
    assert np.abs(vset.b.sum(axis=0)).max() <= 4 * eps
    assert np.abs(vset.v.T @ vset.a).max() <= 4 * eps * lam
    assert np.abs(vset.v.T @ vset.b - np.eye(D)).max() <= 4 * eps


@pytest.mark.parametrize("D,lam", [(1, 0.0), (1, -1.0), (2, np.inf), (3, 1.0)])
def test_velocity_set_domain(D, lam):
  with pytest.raises(DomainError):
    build_velocity_set(D, lam)


def test_lambda_bound_scalar(advection, burgers):
  grid = Grid((8,), ((0.0, 1.0),))
  field = field_from_interior(grid, np.full((8, 1), 0.3))
  assert lambda_bound(advection, field) == pytest.approx(1.1)
  zero = field_from_interior(grid, np.zeros((8, 1)))
  assert lambda_bound(burgers, zero) == LAMBDA_MIN


def test_lambda_bound_shallow_water(sw1):
  grid = Grid((8,), ((0.0, 1.0),))
  field = field_from_interior(grid, np.tile([1.0, 0.0], (8, 1)))
  assert lambda_bound(sw1, field) == pytest.approx(1.1)


def test_lambda_bound_covers_rotation_boundary(rotation):
  grid = Grid((8, 8), ((-1.0, 1.0), (-0.5, 1.5)))
  field = field_from_interior(grid, np.ones((8, 8, 1)))
  # |x_1 - 1/2| peaks at 1.5 on the left edge of the domain
  assert lambda_bound(rotation, field) == pytest.approx(1.1 * 2.0 * 1.5)


def test_lambda_bound_safety(advection):
  grid = Grid((8,), ((0.0, 1.0),))
  with pytest.raises(DomainError):
    lambda_bound(advection, field_from_interior(grid, np.ones((8, 1))), safety=1.0)


def test_maxwellian_burgers(burgers):
  vset = build_velocity_set(1, 4.0)
  F = maxwellian(burgers, vset, np.array([2.0]))
  np.testing.assert_allclose(F[:, 0], [1.25, 0.75])


def test_maxwellian_shallow_water_at_rest(sw1):
  vset = build_velocity_set(1, 2.0)
  F = maxwellian(sw1, vset, np.array([1.0, 0.0]))
  np.testing.assert_allclose(F, [[0.5, 0.125], [0.5, -0.125]])


def test_kinetic_entropy_and_potential_burgers(burgers):
  vset = build_velocity_set(1, 2.0)
  U = np.array([2.0])
  assert kinetic_entropy(burgers, vset, U)[0] == pytest.approx(10.0 / 3.0)
  assert chi_potential(burgers, vset, U)[0, 0] == pytest.approx(16.0 / 3.0)


@pytest.mark.parametrize("dim", [1, 2])
def test_kinetic_sums_shallow_water(dim, rng):
  model = ShallowWater(dim)
  U = sw_states(rng, 500, dim)
  lam = 1.1 * dim * float(np.max(model.max_wave_speed(U)))
  vset = build_velocity_set(dim, lam)

  F = maxwellian(model, vset, U)
  np.testing.assert_allclose(F.sum(axis=0), U, rtol=1e-13, atol=1e-13)
  for d in range(dim):
    np.testing.assert_allclose(np.tensordot(vset.v[:, d], F, axes=1), model.flux(U, None, d), rtol=1e-13, atol=1e-12)

  H = kinetic_entropy(model, vset, U)
  eta = model.entropy(U)
  np.testing.assert_array_less(np.abs(H.sum(axis=0) - eta), 1e-14 * (1.0 + np.abs(eta)) * 8)

  chi = chi_potential(model, vset, U)
  for d in range(dim):
    psi = model.entropy_potential(U, None, d)
    scale = 1.0 + np.abs(chi[:, d]).sum(axis=0)
    np.testing.assert_array_less(np.abs(chi[:, d].sum(axis=0) - psi), 1e-13 * scale)

  assert positivity_margin(model, vset, U) > 0.0


@pytest.mark.parametrize("dim", [1, 2])
def test_kinetic_entropy_variable_matches_macroscopic(dim, rng):
  """Solving (dF_m/dU)^T W = dH_m/dU gives W = V for every velocity"""
  model = ShallowWater(dim)
  for U in sw_states(rng, 10, dim):
    lam = 1.1 * dim * float(model.max_wave_speed(U))
    vset = build_velocity_set(dim, lam)
    V = model.entropy_variable(U)
    for m in range(vset.M):
      J_F = fd_jacobian(lambda W: maxwellian(model, vset, W)[m], U)
      grad_H = fd_jacobian(lambda W: kinetic_entropy(model, vset, W)[m], U)
      np.testing.assert_allclose(np.linalg.solve(J_F.T, grad_H), V, rtol=1e-5, atol=1e-5)


def test_positivity_margin_fails_below_bound(sw1):
  U = np.array([[1.0, 0.0]])
  assert positivity_margin(sw1, build_velocity_set(1, 0.5), U) < 0.0


def test_kinetic_field_projection_and_moments(rng):
  model = ShallowWater(2)
  grid = Grid((4, 5), ((0.0, 1.0), (0.0, 1.0)))
  interior = sw_states(rng, 20, 2).reshape(4, 5, 3)
  field = field_from_interior(grid, interior)
  vset = build_velocity_set(2, lambda_bound(model, field))
  # ghosts must be admissible for the projection
  padded = np.tile([1.0, 0.0, 0.0], grid.shape + (1,))
  padded[grid.interior] = interior
  kfield = project(model, vset, field.with_values(padded))
  assert kfield.M == 4
  assert kfield.p == 3
  assert kfield.component(2).values.shape == grid.shape + (3,)
  np.testing.assert_allclose(moments(kfield).interior, interior, rtol=1e-13, atol=1e-13)


def test_kinetic_field_shape_check():
  grid = Grid((4,), ((0.0, 1.0),))
  with pytest.raises(ShapeError):
    KineticField(grid, np.zeros((2, 4, 1)))
