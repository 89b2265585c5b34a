"""
Vector-kinetic decomposition of a conservation law.

A state U is split into M equilibrium components F_m = a_m U + sum_d b_m^(d) G^(d)(U)
moving with discrete velocities v_m. The velocity sets below are the minimal
ones: two velocities in 1D, four axis-aligned velocities in 2D.

Kinetic arrays put the velocity index first: F has shape (M, ..., p), the
kinetic entropies (M, ...) and the entropy flux potentials (M, dim, ...).
"""

from dataclasses import dataclass
from typing import Optional
import logging

import numpy as np

from ..errors import DomainError, NumericalError, ShapeError
from .conservation_laws import ModelSpec
from .grid import Field, Grid

logger = logging.getLogger(__name__)

LAMBDA_MIN = 1e-8
DEFAULT_SAFETY = 1.1


@dataclass(frozen=True, eq=False)
class VelocitySet:
    """
    Discrete velocities v[m, d] with equilibrium weights a[m] and b[m, d].

    Moment constraints: sum a = 1, sum_m b[m, d] = 0, sum_m v[m, j] a[m] = 0,
    sum_m v[m, j] b[m, d] = delta_jd.
    """

    dim: int
    lam: float
    v: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def M(self) -> int:
        return self.a.shape[0]

    def per_velocity(self, coeff: np.ndarray, ndim: int) -> np.ndarray:
        """Reshape a length-M vector to broadcast against (M, *ndim trailing axes)"""
        return np.reshape(coeff, (self.M,) + (1,) * ndim)


def build_velocity_set(D: int, lam: float) -> VelocitySet:
    """Velocity set for dimension D with speed lam"""
    if not np.isfinite(lam) or lam <= 0.0:
        raise DomainError(f"velocity-set speed must be positive, got {lam}")
    half = 1.0 / (2.0 * lam)
    if D == 1:
        v = np.array([[lam], [-lam]])
        a = np.array([0.5, 0.5])
        b = np.array([[half], [-half]])
    elif D == 2:
        v = np.array([[lam, 0.0], [0.0, lam], [-lam, 0.0], [0.0, -lam]])
        a = np.full(4, 0.25)
        b = np.array([[half, 0.0], [0.0, half], [-half, 0.0], [0.0, -half]])
    else:
        raise DomainError(f"velocity sets exist for 1 or 2 dimensions, got {D}")
    for arr in (v, a, b):
        arr.flags.writeable = False
    return VelocitySet(dim=D, lam=float(lam), v=v, a=a, b=b)


def _positions(model: ModelSpec, grid: Grid, include_ghosts: bool) -> Optional[np.ndarray]:
    return grid.cell_centers(include_ghosts) if model.position_dependent else None


def lambda_bound(model: ModelSpec, field: Field, safety: float = DEFAULT_SAFETY) -> float:
    """
    Velocity-set speed that keeps every dF_m/dU positive-definite.

    lam = safety * (1 in 1D, 2 in 2D) * sup of the model's wave speed over the
    interior cells. Position-dependent models are also sampled on every
    interface so the sup covers the closed domain.
    """
    if not safety > 1.0:
        raise DomainError(f"safety factor must exceed 1, got {safety}")
    grid = field.grid
    U = field.interior
    speeds = model.max_wave_speed(U, _positions(model, grid, include_ghosts=False))
    sup = float(np.max(speeds))
    if model.position_dependent:
        for d, n in enumerate(grid.n_cells):
            neighbour = np.minimum(np.arange(n + 1), n - 1)
            U_face = np.take(U, neighbour, axis=d)
            face_speed = model.max_wave_speed(U_face, grid.interface_coordinates(d))
            sup = max(sup, float(np.max(face_speed)))
    if not np.isfinite(sup):
        raise NumericalError("non-finite wave speed")

    factor = 1.0 if grid.dim == 1 else 2.0
    lam = safety * factor * sup
    if lam < LAMBDA_MIN:
        logger.warning(f"Wave-speed bound {lam:.3g} below floor, using {LAMBDA_MIN:g}")
        lam = LAMBDA_MIN
    return lam


def maxwellian(model: ModelSpec, vset: VelocitySet, U: np.ndarray, x: Optional[np.ndarray] = None) -> np.ndarray:
    """Equilibrium components F_m(U), shape (M, ..., p)"""
    U = np.asarray(U, dtype=float)
    F = vset.per_velocity(vset.a, U.ndim) * U[None]
    for d in range(vset.dim):
        F = F + vset.per_velocity(vset.b[:, d], U.ndim) * model.flux(U, x, d)[None]
    return F


def kinetic_entropy(model: ModelSpec, vset: VelocitySet, U: np.ndarray, x: Optional[np.ndarray] = None) -> np.ndarray:
    """H_m = a_m eta + sum_d b_m^(d) omega^(d), shape (M, ...)"""
    U = np.asarray(U, dtype=float)
    ndim = U.ndim - 1
    H = vset.per_velocity(vset.a, ndim) * model.entropy(U)[None]
    for d in range(vset.dim):
        H = H + vset.per_velocity(vset.b[:, d], ndim) * model.entropy_flux(U, x, d)[None]
    return H


def chi_potential(model: ModelSpec, vset: VelocitySet, U: np.ndarray, x: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Kinetic entropy flux potentials chi_m^(d) = v_m^(d) (V . F_m - H_m).

    Returns:
        Array of shape (M, dim, ...)
    """
    U = np.asarray(U, dtype=float)
    ndim = U.ndim - 1
    V = model.entropy_variable(U)
    F = maxwellian(model, vset, U, x)
    H = kinetic_entropy(model, vset, U, x)
    base = np.sum(V[None] * F, axis=-1) - H
    return np.stack([vset.per_velocity(vset.v[:, d], ndim) * base for d in range(vset.dim)], axis=1)


def positivity_margin(model: ModelSpec, vset: VelocitySet, U: np.ndarray, x: Optional[np.ndarray] = None) -> float:
    """
    Smallest eigenvalue of dF_m/dU over all m and states.

    Each velocity of the minimal sets carries a single non-zero b_m^(d), so the
    eigenvalues are a_m + b_m^(d) times the characteristic speeds of G^(d).
    """
    margin = np.inf
    for m in range(vset.M):
        directions = np.flatnonzero(vset.b[m])
        if directions.size == 0:
            margin = min(margin, float(vset.a[m]))
            continue
        if directions.size > 1:
            raise DomainError("positivity margin needs one active direction per velocity")
        d = int(directions[0])
        eig = vset.a[m] + vset.b[m, d] * model.characteristic_speeds(U, x, d)
        margin = min(margin, float(np.min(eig)))
    return margin


@dataclass(frozen=True, eq=False)
class KineticField:
    """Stacked kinetic components F_m on a grid, shape (M, *grid.shape, p). Read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != self.grid.dim + 2 or values.shape[1:-1] != self.grid.shape:
            raise ShapeError(
                f"kinetic values of shape {values.shape} do not fit grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NumericalError("kinetic field contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[-1]

    def component(self, m: int) -> Field:
        return Field(self.grid, self.values[m])

    def with_values(self, values: np.ndarray) -> "KineticField":
        return KineticField(self.grid, values)


def project(model: ModelSpec, vset: VelocitySet, field: Field) -> KineticField:
    """Maxwellian kinetic field of a conserved field, ghosts included"""
    x = _positions(model, field.grid, include_ghosts=True)
    return KineticField(field.grid, maxwellian(model, vset, field.values, x))


def moments(kfield: KineticField) -> Field:
    """U = sum_m F_m"""
    return Field(kfield.grid, np.sum(kfield.values, axis=0))
