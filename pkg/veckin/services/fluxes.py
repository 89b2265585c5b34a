"""
Interface fluxes for the vector-kinetic scheme.

Kernels are vectorised over interfaces and over the velocity index: given the
states on both sides of a stack of interfaces (shape (..., p)) they return the
fluxes of all M kinetic components at once, shape (M, ..., p).
"""

from dataclasses import dataclass
from typing import Optional, Tuple
import logging

import numpy as np

from ..errors import DomainError
from ..models import SchemeKind
from .conservation_laws import KAPPA, ModelSpec, ShallowWater, state_from_primitive
from .grid import Grid
from .kinetic import VelocitySet, chi_potential, maxwellian

logger = logging.getLogger(__name__)

# Relative threshold below which an entropy-variable jump counts as zero
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FluxRequest:
    """
    Everything the kernels need at a stack of interfaces normal to `direction`.

    jump is [[V]] = V_R - V_L at the interface itself; jump_prev and jump_next
    are the jumps one interface upwind and downwind, needed only by the
    second-order schemes.
    """

    direction: int
    U_L: np.ndarray
    U_R: np.ndarray
    V_L: np.ndarray
    V_R: np.ndarray
    x: Optional[np.ndarray] = None
    jump_prev: Optional[np.ndarray] = None
    jump_next: Optional[np.ndarray] = None

    @property
    def jump(self) -> np.ndarray:
        return self.V_R - self.V_L

    @classmethod
    def from_states(
        cls,
        model: ModelSpec,
        d: int,
        U_L: np.ndarray,
        U_R: np.ndarray,
        x: Optional[np.ndarray] = None,
        jump_prev: Optional[np.ndarray] = None,
        jump_next: Optional[np.ndarray] = None,
    ) -> "FluxRequest":
        U_L = np.asarray(U_L, dtype=float)
        U_R = np.asarray(U_R, dtype=float)
        return cls(
            direction=d,
            U_L=U_L,
            U_R=U_R,
            V_L=model.entropy_variable(U_L),
            V_R=model.entropy_variable(U_R),
            x=x,
            jump_prev=jump_prev,
            jump_next=jump_next,
        )


def pencil(values: np.ndarray, grid: Grid, d: int) -> np.ndarray:
    """Restrict directions other than d to the interior and move axis d to the front"""
    index = tuple(slice(None) if k == d else grid.interior[k] for k in range(grid.dim))
    return np.moveaxis(values[index], d, 0)


def interface_request(model: ModelSpec, grid: Grid, U_values: np.ndarray, d: int) -> FluxRequest:
    """
    Request for all n_d + 1 interfaces normal to direction d.

    Args:
        model: Conservation law
        grid: Grid of the field
        U_values: Conserved values with filled ghosts, shape (*grid.shape, p)
        d: Direction

    Returns:
        FluxRequest whose arrays have the interface index first, shape
        (n_d + 1, *interior cells of the other direction, p)
    """
    g = grid.ghost_width
    n = grid.n_cells[d]
    U = pencil(U_values, grid, d)
    V = model.entropy_variable(U)
    # jumps[j] sits between cells j and j + 1
    jumps = V[1:] - V[:-1]
    x = np.moveaxis(grid.interface_coordinates(d), d, 0) if model.position_dependent else None
    return FluxRequest(
        direction=d,
        U_L=U[g - 1 : g + n],
        U_R=U[g : g + n + 1],
        V_L=V[g - 1 : g + n],
        V_R=V[g : g + n + 1],
        x=x,
        jump_prev=jumps[g - 2 : g + n - 1],
        jump_next=jumps[g : g + n + 1],
    )


def ec_flux_scalar(model: ModelSpec, vset: VelocitySet, req: FluxRequest) -> np.ndarray:
    """
    Entropy-conserving kinetic flux for a scalar law.

    [[chi_m]] / [[V]] where the jump in V is resolvable, the central average
    of v_m F_m otherwise. Potentials are evaluated at the interface position.
    """
    d = req.direction
    ndim = req.U_L.ndim - 1
    chi_L = chi_potential(model, vset, req.U_L, req.x)[:, d]
    chi_R = chi_potential(model, vset, req.U_R, req.x)[:, d]

    V_L = req.V_L[..., 0]
    V_R = req.V_R[..., 0]
    dV = V_R - V_L
    tie = np.abs(dV) <= TIE_RTOL * (1.0 + np.abs(V_L) + np.abs(V_R))

    ratio = (chi_R - chi_L) / np.where(tie, 1.0, dV)[None]
    v_d = vset.per_velocity(vset.v[:, d], ndim)
    F_L = maxwellian(model, vset, req.U_L, req.x)[..., 0]
    F_R = maxwellian(model, vset, req.U_R, req.x)[..., 0]
    central = 0.5 * v_d * (F_L + F_R)
    return np.where(tie[None], central, ratio)[..., None]


def _sw_averages(U_L: np.ndarray, U_R: np.ndarray, kappa: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    model = ShallowWater(np.shape(U_L)[-1] - 1, kappa)
    rho_L, u_L = model.primitive(U_L)
    rho_R, u_R = model.primitive(U_R)
    rho_bar = 0.5 * (rho_L + rho_R)
    u_bar = 0.5 * (u_L + u_R)
    rho2_bar = 0.5 * (rho_L**2 + rho_R**2)
    return rho_bar, u_bar, rho2_bar


def ec_flux_sw(vset: VelocitySet, req: FluxRequest, kappa: float = KAPPA) -> np.ndarray:
    """
    Entropy-conserving kinetic flux for shallow water.

    With arithmetic averages of rho, u_k and rho^2 and s_m = a_m + b_m^(k) u_k:
        mass:       v_m rho s_m
        momentum j: v_m (rho u_j s_m + kappa b_m^(j) <rho^2>)
    """
    d = req.direction
    rho_bar, u_bar, rho2_bar = _sw_averages(req.U_L, req.U_R, kappa)
    ndim = rho_bar.ndim
    dim = u_bar.shape[-1]

    s = vset.per_velocity(vset.a, ndim) + sum(
        vset.per_velocity(vset.b[:, k], ndim) * u_bar[..., k][None] for k in range(dim)
    )
    v_d = vset.per_velocity(vset.v[:, d], ndim)

    flux = np.empty((vset.M,) + np.shape(req.U_L))
    flux[..., 0] = v_d * rho_bar[None] * s
    for j in range(dim):
        b_j = vset.per_velocity(vset.b[:, j], ndim)
        flux[..., 1 + j] = v_d * (rho_bar[None] * u_bar[..., j][None] * s + kappa * b_j * rho2_bar[None])
    return flux


def ec_flux(model: ModelSpec, vset: VelocitySet, req: FluxRequest) -> np.ndarray:
    if isinstance(model, ShallowWater):
        return ec_flux_sw(vset, req, model.kappa)
    return ec_flux_scalar(model, vset, req)


def dissipation_basis(model: ModelSpec, req: FluxRequest) -> Tuple[np.ndarray, np.ndarray]:
    """
    Characteristic basis at the arithmetic-average state.

    Returns:
        R of shape (..., p, p) and the |wave speeds| of shape (..., p).
        Scalar laws use R = 1 and the wave speed at the average state.
    """
    d = req.direction
    if isinstance(model, ShallowWater):
        rho_bar, u_bar, _ = _sw_averages(req.U_L, req.U_R, model.kappa)
        R, Lambda = model.eigen_basis(state_from_primitive(rho_bar, u_bar), d)
        return R, np.diagonal(Lambda, axis1=-2, axis2=-1)
    U_bar = 0.5 * (req.U_L + req.U_R)
    speed = np.abs(model.characteristic_speeds(U_bar, req.x, d))
    return np.ones(np.shape(U_bar) + (1,)), speed


def project_jump(R: np.ndarray, jump: np.ndarray) -> np.ndarray:
    """Characteristic jump w = R^T [[V]]"""
    return np.einsum("...kj,...k->...j", R, jump)


def _from_characteristic(R: np.ndarray, speeds: np.ndarray, w: np.ndarray, M: int) -> np.ndarray:
    """(1 / 2M) R Lambda w"""
    return np.einsum("...kj,...j->...k", R, speeds * w) / (2.0 * M)


def es_dissipation_first(model: ModelSpec, vset: VelocitySet, req: FluxRequest) -> np.ndarray:
    """
    First-order entropy-stable dissipation (1 / 2M) R Lambda R^T [[V]].

    Identical for every velocity m, so the result has shape (..., p).
    """
    R, speeds = dissipation_basis(model, req)
    return _from_characteristic(R, speeds, project_jump(R, req.jump), vset.M)


def minmod(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """s * min(|A|, |B|) when A and B share a sign s, zero otherwise (zero has no sign)"""
    sign = np.sign(A)
    same = (sign == np.sign(B)) & (sign != 0.0)
    return np.where(same, sign * np.minimum(np.abs(A), np.abs(B)), 0.0)


def reconstruct_scaled_jump(
    R: np.ndarray,
    jump_prev: np.ndarray,
    jump: np.ndarray,
    jump_next: np.ndarray,
    limited: bool = False,
) -> np.ndarray:
    """
    Second-order characteristic jump at an interface.

    All three jumps are projected with the basis of the interface itself:
        w - (minmod(w, w_next) + minmod(w_prev, w)) / 2
    Each component lies between 0 and w (sign property). With limited=True a
    field falls back to w wherever one of the two one-sided slopes vanishes.
    """
    w = project_jump(R, jump)
    slope_up = minmod(project_jump(R, jump_prev), w)
    slope_down = minmod(w, project_jump(R, jump_next))
    reconstructed = w - 0.5 * (slope_down + slope_up)
    if limited:
        return np.where(slope_up * slope_down != 0.0, reconstructed, w)
    return reconstructed


def characteristic_jumps(scheme: SchemeKind, R: np.ndarray, req: FluxRequest) -> Tuple[np.ndarray, np.ndarray]:
    """
    Raw characteristic jump w and the jump the scheme dissipates on.

    ES1 dissipates on w itself; ES2 on the minmod reconstruction; ES2Limited
    on the reconstruction where both one-sided slopes are non-zero and on w
    elsewhere.
    """
    scheme = SchemeKind(scheme)
    w = project_jump(R, req.jump)
    if scheme in (SchemeKind.EC, SchemeKind.ES1):
        return w, w
    if req.jump_prev is None or req.jump_next is None:
        raise DomainError(f"scheme {scheme.value} needs the neighbouring jumps")
    limited = scheme == SchemeKind.ES2_LIMITED
    return w, reconstruct_scaled_jump(R, req.jump_prev, req.jump, req.jump_next, limited=limited)


def interface_flux(scheme: SchemeKind, model: ModelSpec, vset: VelocitySet, req: FluxRequest) -> np.ndarray:
    """
    Kinetic interface flux of every velocity, shape (M, ..., p).

    EC: entropy-conserving kernel. ES1: EC minus first-order dissipation.
    ES2: EC minus dissipation on the reconstructed characteristic jump.
    ES2Limited: per characteristic field, ES2 where both one-sided slopes are
    non-zero and ES1 otherwise.
    """
    scheme = SchemeKind(scheme)
    flux = ec_flux(model, vset, req)
    if scheme == SchemeKind.EC:
        return flux
    if scheme == SchemeKind.ES1:
        return flux - es_dissipation_first(model, vset, req)[None]

    R, speeds = dissipation_basis(model, req)
    _, W = characteristic_jumps(scheme, R, req)
    return flux - _from_characteristic(R, speeds, W, vset.M)[None]


def entropy_flux(model: ModelSpec, vset: VelocitySet, req: FluxRequest, flux: np.ndarray) -> np.ndarray:
    """
    Numerical kinetic entropy flux consistent with a kinetic interface flux.

    1/2 (V_L + V_R) . flux_m - 1/2 (chi_m(U_L) + chi_m(U_R)), shape (M, ...).
    Summed over m it is the macroscopic numerical entropy flux.
    """
    d = req.direction
    chi_L = chi_potential(model, vset, req.U_L, req.x)[:, d]
    chi_R = chi_potential(model, vset, req.U_R, req.x)[:, d]
    V_avg = 0.5 * (req.V_L + req.V_R)
    return np.sum(V_avg[None] * flux, axis=-1) - 0.5 * (chi_L + chi_R)


def ec_residual(model: ModelSpec, vset: VelocitySet, req: FluxRequest, flux: np.ndarray) -> np.ndarray:
    """
    Kinetic entropy-conservation residual [[chi_m]] - [[V]] . flux_m, shape (M, ...).

    Zero for EC fluxes; equals [[V]] . D_m [[V]] >= 0 for dissipative fluxes.
    """
    d = req.direction
    chi_jump = chi_potential(model, vset, req.U_R, req.x)[:, d] - chi_potential(model, vset, req.U_L, req.x)[:, d]
    return chi_jump - np.sum(req.jump[None] * flux, axis=-1)
