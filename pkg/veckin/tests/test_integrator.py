import numpy as np
import pytest

from veckin.errors import BlowUpError, DomainError
from veckin.models import BoundaryKind, LambdaPolicy, SchemeKind, StepConfig
from veckin.services import integrator
from veckin.services.cases import build_case, step_config, with_grid
from veckin.services.conservation_laws import make_model
from veckin.services.grid import Field, Grid, fill_ghosts
from veckin.services.integrator import (
  compute_dt,
  entropy_production,
  initial_state,
  macroscopic_rhs,
  run,
  semi_discrete_rhs,
  ssprk3_step,
  ssprk3_update,
)
from veckin.services.kinetic import KineticField, build_velocity_set, maxwellian, project


def small_state(name, n, scheme=None):
  case = with_grid(build_case(name), n)
  model = make_model(case.model_kind)
  config = step_config(case, scheme=scheme)
  return case, model, config, initial_state(case, model, config)


def test_compute_dt():
  config = StepConfig(cfl=0.5, t_end=1.0)
  grid = Grid((100,), ((0.0, 1.0),))
  assert compute_dt(config, grid, 4.0) == pytest.approx(0.00125)
  assert compute_dt(config, grid, 4.0, t=0.9995) == pytest.approx(0.0005)
  grid_2d = Grid((10, 20), ((0.0, 1.0), (0.0, 1.0)))
  assert compute_dt(config, grid_2d, 1.0) == pytest.approx(0.025)
  with pytest.raises(DomainError):
    compute_dt(config, grid, 0.0)


def test_ssprk_with_zero_operator_is_identity(rng):
  y = rng.normal(size=(5, 3))
  np.testing.assert_allclose(ssprk3_update(y, 0.1, np.zeros_like), y, rtol=1e-15, atol=1e-15)


def test_ssprk_linear_decay():
  y = ssprk3_update(np.array([1.0]), 0.1, lambda v: -v)
  # 1 - h + h^2 / 2 - h^3 / 6 at h = 0.1
  assert y[0] == pytest.approx(0.9048333333333334, abs=1e-15)


def test_ssprk_is_third_order():
  errors = []
  for n in (10, 20, 40):
    y = np.array([1.0])
    for _ in range(n):
      y = ssprk3_update(y, 1.0 / n, lambda v: -v)
    errors.append(abs(y[0] - np.exp(-1.0)))
  orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
  np.testing.assert_allclose(orders, 3.0, atol=0.1)


def test_ssprk_hook_sees_every_stage():
  stages = []

  def hook(values, stage):
    stages.append(stage)
    return values

  ssprk3_update(np.ones(2), 0.1, lambda v: -v, hook)
  assert stages == [1, 2, 3]


@pytest.mark.parametrize("scheme", list(SchemeKind))
def test_constant_state_is_steady(scheme):
  model = make_model("sw2d")
  grid = Grid((4, 5), ((0.0, 1.0), (0.0, 1.0)))
  U = Field(grid, np.tile([2.0, 0.3, -0.4], grid.shape + (1,)))
  vset = build_velocity_set(2, 5.0)
  rhs = semi_discrete_rhs(model, vset, project(model, vset, U), scheme)
  np.testing.assert_array_equal(rhs.values, 0.0)


@pytest.mark.parametrize("scheme", list(SchemeKind))
def test_periodic_rhs_conserves(scheme):
  _, model, config, state = small_state("sw-periodic", 16, scheme)
  rhs = semi_discrete_rhs(model, state.vset, state.F, scheme)
  totals = rhs.values.sum(axis=(1, 2))
  scale = np.abs(rhs.values).max()
  np.testing.assert_allclose(totals, 0.0, atol=1e-12 * scale * 16 * 16)


def test_advection_rhs_is_second_order(advection):
  errors = []
  for n in (32, 64, 128):
    grid = Grid((n,), ((0.0, 2.0 * np.pi),))
    x = grid.cell_centers(include_ghosts=True)
    U = Field(grid, np.sin(x))
    vset = build_velocity_set(1, 1.1)
    rhs = semi_discrete_rhs(advection, vset, project(advection, vset, U), SchemeKind.EC)
    total = rhs.values.sum(axis=0)[grid.interior]
    errors.append(np.abs(total + np.cos(grid.cell_centers())).max())
  orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
  assert np.all(orders > 1.9)


@pytest.mark.parametrize("name,n", [("sw-periodic", 16), ("burgers", 32), ("rotation", 16)])
def test_kinetic_and_macroscopic_steps_agree(name, n):
  case, model, config, state = small_state(name, n)
  grid = state.U.grid
  frozen = None if state.frozen is None else state.frozen.values
  dt = compute_dt(config, grid, state.vset.lam)

  kinetic = ssprk3_step(state, dt, model, config)

  def operator(values):
    return macroscopic_rhs(model, state.vset, Field(grid, values), config.scheme).values

  def after_stage(values, stage):
    return fill_ghosts(values, grid, config.boundary, frozen)

  macro = ssprk3_update(state.U.values, dt, operator, after_stage)
  scale = 1.0 + np.abs(macro).max()
  np.testing.assert_allclose(kinetic.U.interior, macro[grid.interior], rtol=0.0, atol=1e-13 * scale)


@pytest.mark.parametrize("name,n", [("sw-periodic", 16), ("burgers", 32), ("advection", 32), ("rotation", 16)])
def test_entropy_conserving_production_vanishes(name, n):
  _, model, _, state = small_state(name, n, SchemeKind.EC)
  production = entropy_production(model, state.vset, state.F, SchemeKind.EC)
  rhs = semi_discrete_rhs(model, state.vset, state.F, SchemeKind.EC).values
  scale = 1.0 + np.abs(rhs).max() * np.abs(model.entropy_variable(state.U.interior)).max()
  assert np.abs(production).max() <= 1e-11 * scale


@pytest.mark.parametrize("scheme", [SchemeKind.ES1, SchemeKind.ES2, SchemeKind.ES2_LIMITED])
@pytest.mark.parametrize("name,n", [("sw-dambreak", 32), ("sw-cyl-dambreak", 16), ("burgers-shock", 32)])
def test_entropy_stable_production_is_nonpositive(scheme, name, n):
  _, model, _, state = small_state(name, n, scheme)
  production = entropy_production(model, state.vset, state.F, scheme)
  rhs = semi_discrete_rhs(model, state.vset, state.F, scheme).values
  scale = 1.0 + np.abs(rhs).max() * np.abs(model.entropy_variable(state.U.interior)).max()
  assert production.max() <= 1e-11 * scale
  assert production.sum(axis=0).min() < 0.0


def test_periodic_run_conserves_totals():
  case = with_grid(build_case("sw-periodic"), 16)
  config = step_config(case, t_end=0.01)
  start = initial_state(case, make_model(case.model_kind), config)
  state, report = run(case, config)
  assert state.t == 0.01
  assert report.n_samples == state.step + 1
  np.testing.assert_allclose(
    state.U.interior.sum(axis=(0, 1)),
    start.U.interior.sum(axis=(0, 1)),
    rtol=1e-12,
    atol=1e-11,
  )


def test_zero_length_run_records_initial_sample():
  case = with_grid(build_case("advection"), 32)
  state, report = run(case, step_config(case, t_end=0.0))
  assert state.step == 0
  assert report.n_samples == 1
  assert report.signed_eta == [0.0]
  assert report.times == [0.0]


def test_entropy_conserving_run_on_fine_grid():
  case = build_case("advection")
  state, report = run(case, step_config(case, t_end=0.2))
  assert np.abs(report.signed_eta).max() <= 1e-9
  assert state.t == 0.2


def test_entropy_stable_run_dissipates():
  case = with_grid(build_case("sw-dambreak"), 64)
  state, report = run(case, step_config(case, t_end=0.05))
  assert max(report.signed_eta) <= 1e-13
  assert report.eta_mean[-1] < report.eta_mean[0]
  assert state.U.interior[..., 0].min() > 0.0


def test_frozen_lambda_keeps_velocity_set():
  case = with_grid(build_case("burgers"), 32)
  config = step_config(case, t_end=0.01, lambda_policy=LambdaPolicy.FROZEN)
  seen = []
  state, _ = run(case, config, on_step=lambda s: seen.append(s.vset.lam))
  assert len(set(seen)) == 1
  assert seen[0] == initial_state(case, make_model(case.model_kind), config).vset.lam


def test_reprojection_keeps_moments():
  case = with_grid(build_case("sw-dambreak"), 32)
  config = step_config(case, t_end=0.02)
  model = make_model(case.model_kind)
  seen = []
  state, _ = run(case, config, on_step=seen.append)
  assert len({s.vset.lam for s in seen}) > 1
  np.testing.assert_allclose(state.F.values.sum(axis=0), state.U.values, rtol=0.0, atol=1e-14)
  refreshed = integrator._refresh_velocity_set(state, model, config)
  np.testing.assert_allclose(refreshed.F.values.sum(axis=0), state.U.values, rtol=1e-14, atol=1e-13)


def test_fixed_boundaries_keep_ghosts():
  case, model, config, state = small_state("sw-expansion", 16)
  assert config.boundary == BoundaryKind.FIXED_FROM_INITIAL
  step = ssprk3_step(state, compute_dt(config, state.U.grid, state.vset.lam), model, config)
  ghosts = maxwellian(model, state.vset, state.frozen.values)
  np.testing.assert_array_equal(step.F.values[:, :2], ghosts[:, :2])
  np.testing.assert_array_equal(step.F.values[:, -2:], ghosts[:, -2:])


def test_overlarge_step_blows_up():
  case, model, config, state = small_state("sw-dambreak", 8, SchemeKind.ES1)
  with pytest.raises(BlowUpError) as info:
    ssprk3_step(state, 1.0, model, config)
  assert info.value.stage == 1
  assert info.value.step == 1


def test_blow_up_carries_partial_report(monkeypatch):
  case = with_grid(build_case("burgers"), 32)

  def exploding_step(state, dt, model, config):
    raise BlowUpError("non-finite kinetic state", state.step + 1, state.t, 2)

  monkeypatch.setattr(integrator, "ssprk3_step", exploding_step)
  with pytest.raises(BlowUpError) as info:
    run(case, step_config(case))
  assert info.value.report is not None
  assert info.value.report.n_samples == 1


def test_rhs_field_shape(burgers):
  grid = Grid((8,), ((0.0, 1.0),))
  values = np.zeros((2,) + grid.shape + (1,))
  rhs = semi_discrete_rhs(burgers, build_velocity_set(1, 1.0), KineticField(grid, values), SchemeKind.ES2)
  assert rhs.values.shape == values.shape
