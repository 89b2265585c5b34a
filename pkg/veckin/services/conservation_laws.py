"""
Macroscopic conservation laws with their entropy structure.

Every model works on stacked states: U has shape (..., p) and positions x have
shape (..., dim). Scalar quantities (entropy, entropy flux, potentials, wave
speeds) come back with shape (...).

Shallow-water states are laid out as (rho, rho*u_1[, rho*u_2]) with pressure
kappa * rho**2 and kappa = 1/2, so gravity g = 2 * kappa = 1.
"""

from abc import ABC, abstractmethod
from typing import Optional, Tuple, Union
from types import SimpleNamespace
import logging

import numpy as np
from scipy import optimize

from ..errors import ConvergenceError, DomainError, PositivityError, ShockFormedError
from ..models import ModelKind

logger = logging.getLogger(__name__)

KAPPA = 0.5

# U0 = sin(2 pi x) has characteristic slopes up to 2 pi
BURGERS_BREAKING_TIME = 1.0 / (2.0 * np.pi)


class ModelSpec(ABC):
    """
    A hyperbolic conservation law dU/dt + sum_d dG^(d)(U, x)/dx_d = 0 with a
    convex entropy pair (eta, omega^(d)).
    """

    name: str = ""
    p: int = 1
    dim: int = 1
    position_dependent: bool = False

    @abstractmethod
    def flux(self, U: np.ndarray, x: Optional[np.ndarray], d: int) -> np.ndarray:
        """Physical flux G^(d), shape (..., p)"""

    @abstractmethod
    def entropy(self, U: np.ndarray) -> np.ndarray:
        """Convex entropy eta(U)"""

    @abstractmethod
    def entropy_flux(self, U: np.ndarray, x: Optional[np.ndarray], d: int) -> np.ndarray:
        """Entropy flux omega^(d)(U, x)"""

    @abstractmethod
    def entropy_variable(self, U: np.ndarray) -> np.ndarray:
        """Entropy variable V = d eta / dU, shape (..., p)"""

    @abstractmethod
    def characteristic_speeds(self, U: np.ndarray, x: Optional[np.ndarray], d: int) -> np.ndarray:
        """Signed eigenvalues of dG^(d)/dU, shape (..., p)"""

    def entropy_potential(self, U: np.ndarray, x: Optional[np.ndarray], d: int) -> np.ndarray:
        """psi^(d) = V . G^(d) - omega^(d)"""
        V = self.entropy_variable(U)
        return np.sum(V * self.flux(U, x, d), axis=-1) - self.entropy_flux(U, x, d)

    def max_wave_speed(self, U: np.ndarray, x: Optional[np.ndarray] = None) -> np.ndarray:
        """Largest |eigenvalue| over all directions, shape (...)"""
        speeds = [np.max(np.abs(self.characteristic_speeds(U, x, d)), axis=-1) for d in range(self.dim)]
        return np.maximum.reduce(speeds) if len(speeds) > 1 else speeds[0]

    def eigen_basis(self, U: np.ndarray, d: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Entropy-scaled eigenvectors and |eigenvalues|; None for scalar laws"""
        return None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, p={self.p}, dim={self.dim})"


# Scalar laws
class LinearAdvection(ModelSpec):
    """U_t + U_x = 0 with eta = U^2 / 2."""

    name = ModelKind.ADVECTION_1D.value
    p = 1
    dim = 1

    def flux(self, U, x, d):
        return np.array(U, dtype=float, copy=True)

    def entropy(self, U):
        return 0.5 * U[..., 0] ** 2

    def entropy_flux(self, U, x, d):
        return 0.5 * U[..., 0] ** 2

    def entropy_variable(self, U):
        return np.array(U, dtype=float, copy=True)

    def entropy_potential(self, U, x, d):
        return 0.5 * U[..., 0] ** 2

    def characteristic_speeds(self, U, x, d):
        return np.ones_like(U, dtype=float)


class Burgers(ModelSpec):
    """U_t + (U^2 / 2)_x = 0 with eta = U^2, omega = 2 U^3 / 3."""

    name = ModelKind.BURGERS_1D.value
    p = 1
    dim = 1

    def flux(self, U, x, d):
        return 0.5 * U**2

    def entropy(self, U):
        return U[..., 0] ** 2

    def entropy_flux(self, U, x, d):
        return (2.0 / 3.0) * U[..., 0] ** 3

    def entropy_variable(self, U):
        return 2.0 * U

    def entropy_potential(self, U, x, d):
        return U[..., 0] ** 3 / 3.0

    def characteristic_speeds(self, U, x, d):
        return np.array(U, dtype=float, copy=True)


class LinearRotation(ModelSpec):
    """
    Solid-body rotation about (1/2, 1/2): G^(1) = -(x_2 - 1/2) U,
    G^(2) = (x_1 - 1/2) U, with eta = U^2.
    """

    name = ModelKind.ROTATION_2D.value
    p = 1
    dim = 2
    position_dependent = True

    @staticmethod
    def coefficient(x: Optional[np.ndarray], d: int) -> np.ndarray:
        if x is None:
            raise DomainError("the rotation model needs positions")
        x = np.asarray(x, dtype=float)
        if d == 0:
            return -(x[..., 1] - 0.5)
        return x[..., 0] - 0.5

    def flux(self, U, x, d):
        return self.coefficient(x, d)[..., None] * U

    def entropy(self, U):
        return U[..., 0] ** 2

    def entropy_flux(self, U, x, d):
        return self.coefficient(x, d) * U[..., 0] ** 2

    def entropy_variable(self, U):
        return 2.0 * U

    def entropy_potential(self, U, x, d):
        return self.coefficient(x, d) * U[..., 0] ** 2

    def characteristic_speeds(self, U, x, d):
        return np.broadcast_to(self.coefficient(x, d)[..., None], np.shape(U)).astype(float)


class ShallowWater(ModelSpec):
    """Shallow-water equations without bottom topography, pressure kappa * rho^2."""

    def __init__(self, dim: int, kappa: float = KAPPA):
        if dim not in (1, 2):
            raise DomainError(f"shallow water is defined for 1 or 2 dimensions, got {dim}")
        self.dim = dim
        self.p = 1 + dim
        self.kappa = kappa
        self.name = ModelKind.SHALLOW_WATER_1D.value if dim == 1 else ModelKind.SHALLOW_WATER_2D.value

    @property
    def gravity(self) -> float:
        return 2.0 * self.kappa

    def primitive(self, U: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Return depth rho (...) and velocity u (..., dim)"""
        U = np.asarray(U, dtype=float)
        rho = U[..., 0]
        if np.any(rho <= 0.0):
            raise PositivityError(f"non-positive depth: min rho = {np.min(rho):.6g}")
        return rho, U[..., 1:] / rho[..., None]

    def flux(self, U, x, d):
        rho, u = self.primitive(U)
        G = np.empty(np.shape(U))
        G[..., 0] = rho * u[..., d]
        G[..., 1:] = rho[..., None] * u * u[..., d : d + 1]
        G[..., 1 + d] += self.kappa * rho**2
        return G

    def entropy(self, U):
        rho, u = self.primitive(U)
        return 0.5 * rho * np.sum(u * u, axis=-1) + self.kappa * rho**2

    def entropy_flux(self, U, x, d):
        rho, u = self.primitive(U)
        return u[..., d] * (0.5 * rho * np.sum(u * u, axis=-1) + 2.0 * self.kappa * rho**2)

    def entropy_variable(self, U):
        rho, u = self.primitive(U)
        V = np.empty(np.shape(U))
        V[..., 0] = 2.0 * self.kappa * rho - 0.5 * np.sum(u * u, axis=-1)
        V[..., 1:] = u
        return V

    def entropy_potential(self, U, x, d):
        rho, u = self.primitive(U)
        return self.kappa * rho**2 * u[..., d]

    def characteristic_speeds(self, U, x, d):
        rho, u = self.primitive(U)
        c = np.sqrt(self.gravity * rho)
        ud = u[..., d]
        if self.dim == 1:
            return np.stack([ud - c, ud + c], axis=-1)
        return np.stack([ud - c, ud, ud + c], axis=-1)

    def eigen_basis(self, U, d):
        return sw_eigen_basis(U, d, kappa=self.kappa)


def sw_eigen_basis(Ubar: np.ndarray, d: int, kappa: float = KAPPA) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenvectors of dG^(d)/dU scaled so that R R^T = dU/dV, and |eigenvalues|.

    Args:
        Ubar: Averaged state(s), shape (..., p) with p = 2 or 3
        d: Direction (0-based)
        kappa: Pressure coefficient

    Returns:
        R of shape (..., p, p) with eigenvectors as columns, ordered
        (u_d - c[, u_d], u_d + c), and Lambda of shape (..., p, p), the
        diagonal matrix of |eigenvalues|.
    """
    model = ShallowWater(np.shape(Ubar)[-1] - 1, kappa)
    rho, u = model.primitive(Ubar)
    g = model.gravity
    c = np.sqrt(g * rho)
    ud = u[..., d]
    scale = 1.0 / np.sqrt(2.0 * g)
    p = model.p

    R = np.zeros(np.shape(Ubar)[:-1] + (p, p))
    slow, fast = 0, p - 1
    R[..., 0, slow] = scale
    R[..., 0, fast] = scale
    R[..., 1 + d, slow] = scale * (ud - c)
    R[..., 1 + d, fast] = scale * (ud + c)
    if p == 3:
        t = 1 - d
        R[..., 1 + t, slow] = scale * u[..., t]
        R[..., 1 + t, fast] = scale * u[..., t]
        # shear wave
        R[..., 1 + t, 1] = np.sqrt(rho)

    speeds = np.abs(model.characteristic_speeds(Ubar, None, d))
    Lambda = speeds[..., :, None] * np.eye(p)
    return R, Lambda


def state_from_primitive(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Conserved shallow-water state from depth (...) and velocity (..., dim)"""
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.concatenate([rho[..., None], rho[..., None] * u], axis=-1)


def make_scalar_model(kind: Union[ModelKind, str]) -> ModelSpec:
    """Build a scalar law: advection1d, rotation2d or burgers1d"""
    kind = ModelKind(kind)
    if kind == ModelKind.ADVECTION_1D:
        return LinearAdvection()
    if kind == ModelKind.ROTATION_2D:
        return LinearRotation()
    if kind == ModelKind.BURGERS_1D:
        return Burgers()
    raise DomainError(f"{kind.value} is not a scalar model")


def make_sw_model(D: int) -> ShallowWater:
    return ShallowWater(D)


def make_model(kind: Union[ModelKind, str]) -> ModelSpec:
    kind = ModelKind(kind)
    if kind == ModelKind.SHALLOW_WATER_1D:
        return make_sw_model(1)
    if kind == ModelKind.SHALLOW_WATER_2D:
        return make_sw_model(2)
    return make_scalar_model(kind)


def advection_exact(x: np.ndarray, t: float) -> np.ndarray:
    """sin^4(x - t) on the periodic interval [0, 2 pi)"""
    shifted = np.mod(np.asarray(x, dtype=float) - t, 2.0 * np.pi)
    return np.sin(shifted) ** 4


def burgers_exact(x: np.ndarray, t: float, tol: float = 1e-15) -> np.ndarray:
    """
    Pre-shock solution of Burgers' equation with U0 = sin(2 pi x).

    Solves U = sin(2 pi (x - U t)) by Newton iteration from U0(x); points where
    Newton stalls above round-off or leaves [-1 - delta, 1 + delta] are
    re-solved by bisection on [-1, 1].

    Raises:
        DomainError: t < 0 or tol <= 0
        ShockFormedError: t at or past the breaking time (a ConvergenceError
            and a DomainError)
        ConvergenceError: neither Newton nor bisection converged
    """
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    if t < 0.0:
        raise DomainError(f"t = {t} is negative")
    if t >= BURGERS_BREAKING_TIME:
        raise ShockFormedError(f"t = {t} is past the breaking time {BURGERS_BREAKING_TIME:.6f}")

    x = np.mod(np.asarray(x, dtype=float), 1.0)
    u0 = np.sin(2.0 * np.pi * x)
    if t == 0.0:
        return u0

    two_pi = 2.0 * np.pi

    def residual(u, xs):
        return u - np.sin(two_pi * (xs - u * t))

    def slope(u, xs):
        return 1.0 + two_pi * t * np.cos(two_pi * (xs - u * t))

    flat_x = np.atleast_1d(x).ravel()
    try:
        result = optimize.newton(
            residual,
            np.atleast_1d(u0).ravel().copy(),
            fprime=slope,
            args=(flat_x,),
            tol=tol,
            maxiter=100,
            full_output=True,
            disp=False,
        )
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(f"Newton iteration failed: {exc}") from exc
    # scipy returns (root, RootResults) instead of a namedtuple for size-1 input
    if isinstance(result, tuple) and not hasattr(result, "root"):
        result = SimpleNamespace(root=np.atleast_1d(result[0]), converged=np.atleast_1d(result[1].converged))
    root = np.asarray(result.root, dtype=float)

    # Round-off floor for the residual of a converged root
    floor = max(tol, 64.0 * np.finfo(float).eps)
    delta = 1e-8
    redo = ~np.isfinite(root) | (np.abs(root) > 1.0 + delta)
    redo |= ~np.asarray(result.converged) & (np.abs(residual(root, flat_x)) > floor)

    for i in np.flatnonzero(redo):
        logger.debug(f"Bisection fallback at x={flat_x[i]:.17g}, t={t:.17g}")
        try:
            root[i] = optimize.bisect(residual, -1.0, 1.0, args=(flat_x[i],), xtol=tol, maxiter=200)
        except (RuntimeError, ValueError) as exc:
            raise ConvergenceError(f"bisection failed at x={flat_x[i]}: {exc}") from exc

    return root.reshape(np.shape(x))
