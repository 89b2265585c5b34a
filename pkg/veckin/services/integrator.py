"""
Semi-discrete assembly and SSPRK(3,3) time stepping of the kinetic components.

The F_m are the prognostic variables. After every Runge-Kutta stage the
conserved field U = sum_m F_m is recombined, ghost layers are refreshed and the
state is screened for blow-up; fluxes of the next stage are computed from U.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple
import logging

import numpy as np

from ..errors import BlowUpError, DomainError
from ..models import BoundaryKind, CaseConfig, EntropyReport, LambdaPolicy, SchemeKind, StepConfig
from .conservation_laws import ModelSpec, ShallowWater, make_model
from .diagnostics import EntropyRecorder, entropy_sample
from .fluxes import entropy_flux, interface_flux, interface_request
from .grid import Field, Grid, apply_bc, fill_ghosts
from .kinetic import (
    KineticField,
    VelocitySet,
    build_velocity_set,
    lambda_bound,
    maxwellian,
    moments,
    project,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RunState:
    """Solution at an accepted step boundary."""

    t: float
    U: Field
    F: KineticField
    vset: VelocitySet
    step: int = 0
    # Ghost source for fixed boundaries (initial data on the whole padded grid)
    frozen: Optional[Field] = None


def _divergence(flux: np.ndarray, dx: float, d: int) -> np.ndarray:
    """Flux difference across each cell, with axis d moved back into place"""
    div = (flux[:, 1:] - flux[:, :-1]) / dx
    return np.moveaxis(div, 1, 1 + d)


def semi_discrete_rhs(model: ModelSpec, vset: VelocitySet, kfield: KineticField, scheme: SchemeKind) -> KineticField:
    """
    L(F)_m = -sum_d (flux_{i+1/2} - flux_{i-1/2}) / dx_d on interior cells.

    Ghosts of kfield must be filled; the returned field has zero ghosts.
    """
    grid = kfield.grid
    U = np.sum(kfield.values, axis=0)
    rhs = np.zeros_like(kfield.values)
    interior = (slice(None),) + grid.interior
    for d in range(grid.dim):
        req = interface_request(model, grid, U, d)
        flux = interface_flux(scheme, model, vset, req)
        rhs[interior] -= _divergence(flux, grid.dx[d], d)
    return KineticField(grid, rhs)


def macroscopic_rhs(model: ModelSpec, vset: VelocitySet, field: Field, scheme: SchemeKind) -> Field:
    """Right-hand side for U built from the velocity-summed kinetic fluxes"""
    grid = field.grid
    rhs = np.zeros_like(field.values)
    for d in range(grid.dim):
        req = interface_request(model, grid, field.values, d)
        flux = np.sum(interface_flux(scheme, model, vset, req), axis=0)
        rhs[grid.interior] -= _divergence(flux[None], grid.dx[d], d)[0]
    return Field(grid, rhs)


def entropy_production(model: ModelSpec, vset: VelocitySet, kfield: KineticField, scheme: SchemeKind) -> np.ndarray:
    """
    Semi-discrete kinetic entropy production per cell, shape (M, *cells).

    V_i . L(F)_m + sum_d (Hflux_{i+1/2} - Hflux_{i-1/2}) / dx_d with the
    numerical entropy flux consistent with the scheme. Zero for EC; summed
    over m it is non-positive for the dissipative schemes.
    """
    grid = kfield.grid
    U = np.sum(kfield.values, axis=0)
    V = model.entropy_variable(U[grid.interior])
    rhs = semi_discrete_rhs(model, vset, kfield, scheme).values[(slice(None),) + grid.interior]
    production = np.sum(V[None] * rhs, axis=-1)
    for d in range(grid.dim):
        req = interface_request(model, grid, U, d)
        flux = interface_flux(scheme, model, vset, req)
        H_flux = entropy_flux(model, vset, req, flux)
        production += _divergence(H_flux[..., None], grid.dx[d], d)[..., 0]
    return production


def compute_dt(config: StepConfig, grid: Grid, lam: float, t: float = 0.0) -> float:
    """dt = min(C min_d dx_d / lam, T - t)"""
    if not lam > 0.0:
        raise DomainError(f"velocity-set speed must be positive, got {lam}")
    return min(config.cfl * min(grid.dx) / lam, config.t_end - t)


def ssprk3_update(
    values: np.ndarray,
    dt: float,
    operator: Callable[[np.ndarray], np.ndarray],
    after_stage: Optional[Callable[[np.ndarray, int], np.ndarray]] = None,
) -> np.ndarray:
    """
    One SSPRK(3,3) step in Shu-Osher form.

    Args:
        values: State array
        dt: Time step
        operator: Semi-discrete right-hand side L
        after_stage: Hook applied to each stage result (stage numbers 1..3)

    Returns:
        State after the step
    """
    finish = after_stage if after_stage is not None else (lambda y, stage: y)
    y1 = finish(values + dt * operator(values), 1)
    y2 = finish(0.75 * values + 0.25 * (y1 + dt * operator(y1)), 2)
    return finish(values / 3.0 + 2.0 / 3.0 * (y2 + dt * operator(y2)), 3)


def _kinetic_ghost_source(model: ModelSpec, vset: VelocitySet, frozen: Optional[Field]) -> Optional[np.ndarray]:
    if frozen is None:
        return None
    x = frozen.grid.cell_centers(include_ghosts=True) if model.position_dependent else None
    return maxwellian(model, vset, frozen.values, x)


def ssprk3_step(state: RunState, dt: float, model: ModelSpec, config: StepConfig) -> RunState:
    """Advance the kinetic components by dt"""
    if not dt > 0.0:
        raise DomainError(f"time step must be positive, got {dt}")
    grid = state.F.grid
    vset = state.vset
    boundary = BoundaryKind(config.boundary)
    ghost_source = _kinetic_ghost_source(model, vset, state.frozen)
    if boundary == BoundaryKind.FIXED_FROM_INITIAL and ghost_source is None:
        raise DomainError("fixed boundaries need the frozen initial field")

    def operator(values: np.ndarray) -> np.ndarray:
        return semi_discrete_rhs(model, vset, KineticField(grid, values), config.scheme).values

    def after_stage(values: np.ndarray, stage: int) -> np.ndarray:
        if not np.all(np.isfinite(values)):
            raise BlowUpError("non-finite kinetic state", state.step + 1, state.t, stage)
        values = fill_ghosts(values, grid, boundary, ghost_source)
        if isinstance(model, ShallowWater):
            depth = np.sum(values[..., 0], axis=0)
            if np.any(depth <= 0.0):
                raise BlowUpError(
                    f"non-positive depth {np.min(depth):.3g}", state.step + 1, state.t, stage
                )
        return values

    F_new = KineticField(grid, ssprk3_update(state.F.values, dt, operator, after_stage))
    return replace(state, t=state.t + dt, U=moments(F_new), F=F_new, step=state.step + 1)


def initial_state(case: CaseConfig, model: ModelSpec, config: StepConfig) -> RunState:
    """Initial data on the padded grid, ghosts filled, Maxwellian kinetic components"""
    grid = Grid(tuple(case.n_cells), tuple(case.bounds))
    x = grid.cell_centers(include_ghosts=True)
    initial = Field(grid, case.initial_condition(x))
    boundary = BoundaryKind(config.boundary)
    frozen = initial if boundary == BoundaryKind.FIXED_FROM_INITIAL else None
    U = apply_bc(initial, boundary, frozen)
    vset = build_velocity_set(grid.dim, lambda_bound(model, U, config.lambda_safety))
    return RunState(t=0.0, U=U, F=project(model, vset, U), vset=vset, step=0, frozen=frozen)


def _refresh_velocity_set(state: RunState, model: ModelSpec, config: StepConfig) -> RunState:
    lam = lambda_bound(model, state.U, config.lambda_safety)
    if lam == state.vset.lam:
        return state
    vset = build_velocity_set(state.U.grid.dim, lam)
    logger.debug(f"Step {state.step}: lambda {state.vset.lam:.6g} -> {lam:.6g}")
    if config.reproject_on_lambda_change:
        return replace(state, vset=vset, F=project(model, vset, state.U))
    return replace(state, vset=vset)


def run(
    case: CaseConfig,
    config: StepConfig,
    on_step: Optional[Callable[[RunState], None]] = None,
) -> Tuple[RunState, EntropyReport]:
    """
    Integrate a case from t = 0 to config.t_end.

    Entropy diagnostics are sampled at t = 0 and after every accepted step.

    Raises:
        BlowUpError: with the partial report attached as `report`
    """
    model = make_model(case.model_kind)
    state = initial_state(case, model, config)
    recorder = EntropyRecorder()
    recorder.record(entropy_sample(model, state.vset, state))
    t_end = config.t_end
    logger.info(
        f"Running {case.name}: scheme={SchemeKind(config.scheme).value}, cells={list(case.n_cells)}, "
        f"T={t_end:.6g}, C={config.cfl}, lambda={state.vset.lam:.6g}"
    )

    while state.t < t_end:
        if config.lambda_policy == LambdaPolicy.PER_STEP and state.step > 0:
            state = _refresh_velocity_set(state, model, config)
        dt = compute_dt(config, state.U.grid, state.vset.lam, state.t)
        clamped = dt == t_end - state.t
        try:
            state = ssprk3_step(state, dt, model, config)
        except BlowUpError as exc:
            exc.report = recorder.report
            logger.error(f"Run {case.name} blew up: {exc}")
            raise
        if clamped:
            state = replace(state, t=t_end)
        recorder.record(entropy_sample(model, state.vset, state))
        if on_step is not None:
            on_step(state)
        if state.step % 100 == 0:
            logger.debug(
                f"step={state.step} t={state.t:.6g} dt={dt:.3g} signed_eta={recorder.report.signed_eta[-1]:.3e}"
            )

    logger.info(f"Finished {case.name} after {state.step} steps at t={state.t:.6g}")
    return state, recorder.report
