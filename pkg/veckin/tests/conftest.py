import numpy as np
import pytest

from veckin.services.conservation_laws import (
  Burgers,
  LinearAdvection,
  LinearRotation,
  ShallowWater,
  state_from_primitive,
)


def sw_states(rng, size, dim):
  """Admissible shallow-water states: depth in [0.5, 3], velocities in [-2, 2]"""
  rho = rng.uniform(0.5, 3.0, size)
  u = rng.uniform(-2.0, 2.0, (size, dim))
  return state_from_primitive(rho, u)


def fd_jacobian(func, U, h=1e-6):
  """Central-difference Jacobian of a map (p,) -> (q,) or (p,) -> scalar"""
  U = np.asarray(U, dtype=float)
  columns = []
  for k in range(U.shape[-1]):
    step = np.zeros_like(U)
    step[k] = h * (1.0 + abs(U[k]))
    columns.append((np.asarray(func(U + step)) - np.asarray(func(U - step))) / (2.0 * step[k]))
  return np.stack(columns, axis=-1)


@pytest.fixture
def rng():
  return np.random.default_rng(12345)


@pytest.fixture
def advection():
  return LinearAdvection()


@pytest.fixture
def burgers():
  return Burgers()


@pytest.fixture
def rotation():
  return LinearRotation()


@pytest.fixture
def sw1():
  return ShallowWater(1)


@pytest.fixture
def sw2():
  return ShallowWater(2)
