"""
Structured uniform grids with ghost layers, cell-centred fields and boundary fills.

Arrays are laid out as (*leading, *cells_with_ghosts, p): spatial axes first in
direction order, conserved components last. Leading axes (e.g. the velocity
index of a kinetic field) are carried through the ghost fill untouched.
"""

from dataclasses import dataclass
from typing import Optional, Tuple
import logging

import numpy as np

from ..errors import DomainError, NumericalError, ShapeError
from ..models import BoundaryKind

logger = logging.getLogger(__name__)

# Widest stencil: second-order reconstruction reads cells i-1 .. i+2 of an interface
GHOST_WIDTH = 2


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform cell-centred grid on a half-open box [lo, hi) per direction."""

    n_cells: Tuple[int, ...]
    bounds: Tuple[Tuple[float, float], ...]
    ghost_width: int = GHOST_WIDTH

    def __post_init__(self):
        object.__setattr__(self, "n_cells", tuple(int(n) for n in self.n_cells))
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))
        if len(self.n_cells) not in (1, 2):
            raise DomainError(f"grid dimension must be 1 or 2, got {len(self.n_cells)}")
        if len(self.bounds) != len(self.n_cells):
            raise DomainError("one (lo, hi) pair is needed per direction")
        for n, (lo, hi) in zip(self.n_cells, self.bounds):
            if n < 4:
                raise DomainError(f"at least 4 cells per direction are required, got {n}")
            if not hi > lo:
                raise DomainError(f"empty interval [{lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.n_cells)

    @property
    def dx(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / n for n, (lo, hi) in zip(self.n_cells, self.bounds))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.dx))

    @property
    def n_interior(self) -> int:
        return int(np.prod(self.n_cells))

    @property
    def shape(self) -> Tuple[int, ...]:
        """Spatial shape including ghost layers"""
        return tuple(n + 2 * self.ghost_width for n in self.n_cells)

    @property
    def interior(self) -> Tuple[slice, ...]:
        g = self.ghost_width
        return tuple(slice(g, g + n) for n in self.n_cells)

    def axis_centers(self, d: int, include_ghosts: bool = True) -> np.ndarray:
        """Cell-centre coordinates along direction d"""
        lo, _ = self.bounds[d]
        g = self.ghost_width if include_ghosts else 0
        k = np.arange(-g, self.n_cells[d] + g)
        return lo + (k + 0.5) * self.dx[d]

    def cell_centers(self, include_ghosts: bool = False) -> np.ndarray:
        """Cell centres as an array of shape (*cells, dim)"""
        axes = [self.axis_centers(d, include_ghosts) for d in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def interface_coordinates(self, d: int) -> np.ndarray:
        """
        Coordinates of the n_d + 1 interfaces normal to direction d.

        Other directions are restricted to interior cell centres, so the result
        has shape (*cells with n_d + 1 along axis d, dim).
        """
        axes = []
        for k in range(self.dim):
            if k == d:
                lo, _ = self.bounds[d]
                axes.append(lo + np.arange(self.n_cells[d] + 1) * self.dx[d])
            else:
                axes.append(self.axis_centers(k, include_ghosts=False))
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


@dataclass(frozen=True, eq=False)
class Field:
    """Cell-centred p-vector field with ghost layers. Values are read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != self.grid.dim + 1 or values.shape[:-1] != self.grid.shape:
            raise ShapeError(
                f"field values of shape {values.shape} do not fit grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NumericalError("field contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def p(self) -> int:
        return self.values.shape[-1]

    @property
    def interior(self) -> np.ndarray:
        return self.values[self.grid.interior]

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


def field_from_interior(grid: Grid, interior: np.ndarray) -> Field:
    """Embed interior values in a zero-ghost field"""
    interior = np.asarray(interior, dtype=float)
    if interior.shape[:-1] != grid.n_cells:
        raise ShapeError(f"interior shape {interior.shape} does not match grid {grid.n_cells}")
    values = np.zeros(grid.shape + (interior.shape[-1],))
    values[grid.interior] = interior
    return Field(grid, values)


def _along(ndim: int, axis: int, sl: slice) -> Tuple[slice, ...]:
    index = [slice(None)] * ndim
    index[axis] = sl
    return tuple(index)


def fill_ghosts(
    values: np.ndarray,
    grid: Grid,
    kind: BoundaryKind,
    frozen: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Return a copy of values with every ghost layer filled.

    Args:
        values: Array of shape (*leading, *grid.shape, p)
        grid: Grid the spatial axes live on
        kind: Boundary kind
        frozen: Ghost source for FixedFromInitial, same shape as values

    Returns:
        New array; interior cells are copied unchanged
    """
    values = np.asarray(values, dtype=float)
    lead = values.ndim - grid.dim - 1
    if lead < 0 or values.shape[lead:-1] != grid.shape:
        raise ShapeError(f"array of shape {values.shape} does not fit grid shape {grid.shape}")

    if kind == BoundaryKind.PERIODIC:
        if frozen is not None:
            raise DomainError("periodic boundaries take no frozen ghost values")
        out = values.copy()
        g = grid.ghost_width
        # direction 0 first, then direction 1 (fills corners)
        for d, n in enumerate(grid.n_cells):
            axis = lead + d
            out[_along(out.ndim, axis, slice(0, g))] = out[_along(out.ndim, axis, slice(n, n + g))]
            out[_along(out.ndim, axis, slice(n + g, n + 2 * g))] = out[_along(out.ndim, axis, slice(g, 2 * g))]
        return out

    if frozen is None:
        raise DomainError("fixed boundaries need frozen ghost values")
    frozen = np.asarray(frozen, dtype=float)
    if frozen.shape != values.shape:
        raise ShapeError(f"frozen ghosts of shape {frozen.shape} do not match {values.shape}")
    out = frozen.copy()
    interior = (slice(None),) * lead + grid.interior
    out[interior] = values[interior]
    return out


def apply_bc(field: Field, kind: BoundaryKind, frozen: Optional[Field] = None) -> Field:
    """Fill the ghost layers of a field; the interior is untouched."""
    if kind == BoundaryKind.FIXED_FROM_INITIAL and frozen is None:
        raise DomainError("fixed boundaries need a frozen field")
    if kind == BoundaryKind.PERIODIC and frozen is not None:
        raise DomainError("periodic boundaries take no frozen field")
    frozen_values = None
    if frozen is not None:
        if frozen.grid.shape != field.grid.shape or frozen.p != field.p:
            raise ShapeError("frozen field does not match the field's grid or components")
        frozen_values = frozen.values
    return field.with_values(fill_ghosts(field.values, field.grid, kind, frozen_values))
