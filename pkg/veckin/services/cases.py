"""
Registry of benchmark problems.

Initial conditions and exact solutions take positions of shape (..., dim) and
return conserved states of shape (..., p).
"""

from typing import Callable, Dict, List, Optional
import logging

import numpy as np

from ..errors import UnknownCaseError
from ..models import (
    BoundaryKind,
    CaseConfig,
    LambdaPolicy,
    ModelKind,
    ReferenceKind,
    SchemeKind,
    StepConfig,
)
from .conservation_laws import advection_exact, burgers_exact, state_from_primitive

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# Vortex background and strength
VORTEX_RHO = 110.0
VORTEX_DRIFT = 0.6
VORTEX_STRENGTH = 1.5
VORTEX_SCALE = 0.64
VORTEX_CENTER = (0.5, 0.5)

HUMP_CENTER = (0.0, 0.5)
HUMP_RADIUS = 0.25


# Scalar problems
def advection_initial(x: np.ndarray) -> np.ndarray:
    return (np.sin(x[..., 0]) ** 4)[..., None]


def advection_reference(x: np.ndarray, t: float) -> np.ndarray:
    return advection_exact(x[..., 0], t)[..., None]


def rotation_initial(x: np.ndarray) -> np.ndarray:
    """Cosine hump of height 1, compactly supported"""
    r = np.hypot(x[..., 0] - HUMP_CENTER[0], x[..., 1] - HUMP_CENTER[1])
    hump = np.where(r < HUMP_RADIUS, 0.5 * (1.0 + np.cos(np.pi * r / HUMP_RADIUS)), 0.0)
    return hump[..., None]


def burgers_initial(x: np.ndarray) -> np.ndarray:
    return np.sin(TWO_PI * x[..., 0])[..., None]


def burgers_reference(x: np.ndarray, t: float) -> np.ndarray:
    return burgers_exact(x[..., 0], t)[..., None]


# Shallow water
def expansion_initial(x: np.ndarray) -> np.ndarray:
    rho = np.ones(x.shape[:-1])
    u = np.where(x[..., 0] < 0.0, -4.0, 4.0)[..., None]
    return state_from_primitive(rho, u)


def dambreak_initial(x: np.ndarray) -> np.ndarray:
    rho = np.where(x[..., 0] < 0.0, 15.0, 1.0)
    return state_from_primitive(rho, np.zeros(x.shape[:-1] + (1,)))


def periodic_flow_initial(x: np.ndarray) -> np.ndarray:
    rho = 1.0 + np.sin(TWO_PI * (x[..., 0] + x[..., 1])) ** 2
    speed = np.sin(TWO_PI * (x[..., 0] - x[..., 1]))
    return state_from_primitive(rho, np.stack([speed, speed], axis=-1))


def _vortex_profile(q: np.ndarray) -> np.ndarray:
    return (
        2.0 * np.cos(q)
        + 2.0 * q * np.sin(q)
        + np.cos(2.0 * q) / 8.0
        + q * np.sin(2.0 * q) / 4.0
        + 0.75 * q**2
    )


def vortex_initial(x: np.ndarray) -> np.ndarray:
    """Travelling vortex on [0, 1)^2 drifting with speed 0.6 along x_1"""
    dx1 = x[..., 0] - VORTEX_CENTER[0]
    dx2 = x[..., 1] - VORTEX_CENTER[1]
    rc = 2.0 * TWO_PI * np.hypot(dx1, dx2)
    inside = (rc < np.pi).astype(float)
    amplitude = VORTEX_STRENGTH / (2.0 * TWO_PI)
    rho = VORTEX_RHO + VORTEX_SCALE * amplitude**2 * inside * (_vortex_profile(rc) - _vortex_profile(np.pi))
    swirl = VORTEX_STRENGTH * (1.0 + np.cos(rc)) * inside
    u1 = VORTEX_DRIFT + swirl * (0.5 - x[..., 1])
    u2 = swirl * (x[..., 0] - 0.5)
    return state_from_primitive(rho, np.stack([u1, u2], axis=-1))


def vortex_reference(x: np.ndarray, t: float) -> np.ndarray:
    """Initial vortex carried periodically by the background drift"""
    shifted = np.array(x, dtype=float, copy=True)
    shifted[..., 0] = np.mod(shifted[..., 0] - VORTEX_DRIFT * t, 1.0)
    return vortex_initial(shifted)


def cylindrical_dambreak_initial(x: np.ndarray) -> np.ndarray:
    rho = np.where(np.hypot(x[..., 0], x[..., 1]) < 0.5, 2.0, 1.0)
    return state_from_primitive(rho, np.zeros(x.shape[:-1] + (2,)))


def _advection() -> CaseConfig:
    return CaseConfig(
        name="advection",
        model_kind=ModelKind.ADVECTION_1D,
        bounds=[(0.0, TWO_PI)],
        n_cells=[256],
        initial_condition=advection_initial,
        boundary=BoundaryKind.PERIODIC,
        scheme=SchemeKind.EC,
        cfl=0.1,
        t_end=TWO_PI,
        reference=ReferenceKind.EXACT,
        exact_solution=advection_reference,
        eoc_grids=[32, 64, 128, 256],
        description="Linear advection of sin^4 over one period",
    )


def _rotation() -> CaseConfig:
    return CaseConfig(
        name="rotation",
        model_kind=ModelKind.ROTATION_2D,
        bounds=[(-1.0, 1.0), (-0.5, 1.5)],
        n_cells=[256, 256],
        initial_condition=rotation_initial,
        boundary=BoundaryKind.FIXED_FROM_INITIAL,
        scheme=SchemeKind.EC,
        cfl=0.9,
        t_end=0.5,
        description="Solid-body rotation of a cosine hump about (1/2, 1/2)",
    )


def _burgers() -> CaseConfig:
    return CaseConfig(
        name="burgers",
        model_kind=ModelKind.BURGERS_1D,
        bounds=[(0.0, 1.0)],
        n_cells=[256],
        initial_condition=burgers_initial,
        boundary=BoundaryKind.PERIODIC,
        scheme=SchemeKind.EC,
        cfl=0.1,
        t_end=0.1 / TWO_PI,
        reference=ReferenceKind.EXACT,
        exact_solution=burgers_reference,
        eoc_grids=[64, 128, 256],
        description="Inviscid Burgers before shock formation",
    )


def _burgers_shock() -> CaseConfig:
    return CaseConfig(
        name="burgers-shock",
        model_kind=ModelKind.BURGERS_1D,
        bounds=[(0.0, 1.0)],
        n_cells=[256],
        initial_condition=burgers_initial,
        boundary=BoundaryKind.PERIODIC,
        scheme=SchemeKind.ES2,
        cfl=0.1,
        t_end=0.25,
        description="Inviscid Burgers past shock formation",
    )


def _sw_expansion() -> CaseConfig:
    return CaseConfig(
        name="sw-expansion",
        model_kind=ModelKind.SHALLOW_WATER_1D,
        bounds=[(-1.0, 1.0)],
        n_cells=[128],
        initial_condition=expansion_initial,
        boundary=BoundaryKind.FIXED_FROM_INITIAL,
        scheme=SchemeKind.ES1,
        cfl=0.1,
        t_end=0.1,
        description="Two receding streams opening a near-dry region",
    )


def _sw_dambreak() -> CaseConfig:
    return CaseConfig(
        name="sw-dambreak",
        model_kind=ModelKind.SHALLOW_WATER_1D,
        bounds=[(-1.0, 1.0)],
        n_cells=[128],
        initial_condition=dambreak_initial,
        boundary=BoundaryKind.FIXED_FROM_INITIAL,
        scheme=SchemeKind.ES1,
        cfl=0.4,
        t_end=0.15,
        description="Dam break with depth ratio 15:1",
    )


def _sw_periodic() -> CaseConfig:
    return CaseConfig(
        name="sw-periodic",
        model_kind=ModelKind.SHALLOW_WATER_2D,
        bounds=[(0.0, 1.0), (0.0, 1.0)],
        n_cells=[256, 256],
        initial_condition=periodic_flow_initial,
        boundary=BoundaryKind.PERIODIC,
        scheme=SchemeKind.EC,
        cfl=0.5,
        t_end=0.1,
        reference=ReferenceKind.SELF_CONVERGENCE,
        reference_grid=512,
        eoc_grids=[32, 64, 128, 256],
        description="Smooth doubly periodic flow",
    )


def _sw_vortex() -> CaseConfig:
    return CaseConfig(
        name="sw-vortex",
        model_kind=ModelKind.SHALLOW_WATER_2D,
        bounds=[(0.0, 1.0), (0.0, 1.0)],
        n_cells=[256, 256],
        initial_condition=vortex_initial,
        boundary=BoundaryKind.PERIODIC,
        scheme=SchemeKind.EC,
        cfl=0.5,
        t_end=0.1,
        reference=ReferenceKind.EXACT,
        exact_solution=vortex_reference,
        eoc_grids=[32, 64, 128],
        description="Travelling vortex on a deep background",
    )


def _sw_cylindrical_dambreak() -> CaseConfig:
    return CaseConfig(
        name="sw-cyl-dambreak",
        model_kind=ModelKind.SHALLOW_WATER_2D,
        bounds=[(-1.0, 1.0), (-1.0, 1.0)],
        n_cells=[100, 100],
        initial_condition=cylindrical_dambreak_initial,
        boundary=BoundaryKind.PERIODIC,
        scheme=SchemeKind.ES1,
        cfl=0.4,
        t_end=0.2,
        description="Collapse of a cylindrical water column",
    )


CASES: Dict[str, Callable[[], CaseConfig]] = {
    "advection": _advection,
    "rotation": _rotation,
    "burgers": _burgers,
    "burgers-shock": _burgers_shock,
    "sw-expansion": _sw_expansion,
    "sw-dambreak": _sw_dambreak,
    "sw-periodic": _sw_periodic,
    "sw-vortex": _sw_vortex,
    "sw-cyl-dambreak": _sw_cylindrical_dambreak,
}


def case_names() -> List[str]:
    return list(CASES)


def build_case(name: str) -> CaseConfig:
    """Look up a benchmark by name"""
    try:
        builder = CASES[name]
    except KeyError:
        raise UnknownCaseError(f"unknown case '{name}'; available: {', '.join(CASES)}") from None
    return builder()


def with_grid(case: CaseConfig, n: int, ny: Optional[int] = None) -> CaseConfig:
    """Copy of a case on n cells per direction (ny overrides direction 2)"""
    n_cells = [n] * case.dim
    if ny is not None and case.dim == 2:
        n_cells[1] = ny
    return case.model_copy(update={"n_cells": n_cells})


def step_config(
    case: CaseConfig,
    scheme: Optional[SchemeKind] = None,
    cfl: Optional[float] = None,
    t_end: Optional[float] = None,
    lambda_policy: LambdaPolicy = LambdaPolicy.PER_STEP,
    lambda_safety: float = 1.1,
) -> StepConfig:
    """Step configuration from case defaults, overridden where given"""
    return StepConfig(
        cfl=case.cfl if cfl is None else cfl,
        scheme=case.scheme if scheme is None else scheme,
        lambda_policy=lambda_policy,
        lambda_safety=lambda_safety,
        t_end=case.t_end if t_end is None else t_end,
        boundary=case.boundary,
    )
