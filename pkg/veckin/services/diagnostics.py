"""
Entropy bookkeeping, error norms, convergence orders and entropy-condition audits.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence
import logging

import numpy as np

from ..errors import EocUndefinedError, ShapeError
from ..models import EntropyReport, EocRow, EocTable, NormWeight, SchemeKind
from .conservation_laws import ModelSpec
from .fluxes import (
    characteristic_jumps,
    dissipation_basis,
    ec_residual,
    interface_flux,
    interface_request,
)
from .grid import Field
from .kinetic import VelocitySet, kinetic_entropy, moments

if TYPE_CHECKING:
    from .integrator import RunState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EntropySample:
    """Per-cell entropies of one time level: eta (N,) and H (M, N)."""

    t: float
    eta: np.ndarray
    H: np.ndarray

    @property
    def eta_mean(self) -> float:
        return float(np.mean(self.eta))

    @property
    def H_mean(self) -> List[float]:
        return [float(h) for h in np.mean(self.H, axis=1)]


def entropy_sample(model: ModelSpec, vset: VelocitySet, state: "RunState") -> EntropySample:
    """Macroscopic and kinetic entropies of the interior cells, from U = sum_m F_m"""
    U_field = moments(state.F)
    grid = U_field.grid
    U = U_field.interior
    x = grid.cell_centers() if model.position_dependent else None
    eta = model.entropy(U).reshape(-1)
    H = kinetic_entropy(model, vset, U, x).reshape(vset.M, -1)
    return EntropySample(t=float(state.t), eta=eta, H=H)


def _check_lengths(curr: np.ndarray, prev: np.ndarray):
    if np.shape(curr) != np.shape(prev):
        raise ShapeError(f"cannot compare arrays of shapes {np.shape(curr)} and {np.shape(prev)}")


def signed_error(curr: np.ndarray, prev: np.ndarray) -> float:
    """sum(curr - prev) / N; negative values mean global entropy dissipation"""
    curr = np.asarray(curr, dtype=float)
    prev = np.asarray(prev, dtype=float)
    _check_lengths(curr, prev)
    return float(np.sum(curr - prev) / curr.size)


def absolute_error(curr: np.ndarray, prev: np.ndarray) -> float:
    """sum(|curr - prev|) / N"""
    curr = np.asarray(curr, dtype=float)
    prev = np.asarray(prev, dtype=float)
    _check_lengths(curr, prev)
    return float(np.sum(np.abs(curr - prev)) / curr.size)


class EntropyRecorder:
    """Accumulates an EntropyReport, one sample per accepted step."""

    def __init__(self):
        self.report = EntropyReport()
        self._previous: Optional[EntropySample] = None

    def record(self, sample: EntropySample):
        prev = self._previous if self._previous is not None else sample
        report = self.report
        report.times.append(sample.t)
        report.eta_mean.append(sample.eta_mean)
        report.H_mean.append(sample.H_mean)
        report.signed_eta.append(signed_error(sample.eta, prev.eta))
        report.abs_eta.append(absolute_error(sample.eta, prev.eta))
        report.signed_H.append([signed_error(h, h0) for h, h0 in zip(sample.H, prev.H)])
        report.abs_H.append([absolute_error(h, h0) for h, h0 in zip(sample.H, prev.H)])
        self._previous = sample


def l2_error(field: Field, reference: np.ndarray, weight: NormWeight = NormWeight.VOLUME) -> np.ndarray:
    """
    Discrete L2 error per component.

    Args:
        field: Numerical solution
        reference: Reference values at the interior cells, shape of field.interior
        weight: VOLUME gives sqrt(sum err^2 * cell volume); COUNT gives
            sqrt(sum err^2) / N, the normalisation of the published tables

    Returns:
        Array of shape (p,)
    """
    reference = np.asarray(reference, dtype=float)
    if reference.shape != field.interior.shape:
        raise ShapeError(f"reference of shape {reference.shape} does not match {field.interior.shape}")
    err = field.interior - reference
    axes = tuple(range(err.ndim - 1))
    squared = np.sum(err * err, axis=axes)
    if NormWeight(weight) == NormWeight.COUNT:
        return np.sqrt(squared) / field.grid.n_interior
    return np.sqrt(squared * field.grid.cell_volume)


def restrict(values: np.ndarray, factor: int) -> np.ndarray:
    """
    Average blocks of factor^dim fine cells onto the coarse cell they cover.

    Args:
        values: Interior fine-grid values, shape (*cells, p)
        factor: Integer refinement ratio
    """
    values = np.asarray(values, dtype=float)
    cells = values.shape[:-1]
    if factor < 1 or any(n % factor for n in cells):
        raise ShapeError(f"cannot restrict {cells} cells by a factor {factor}")
    shape: List[int] = []
    for n in cells:
        shape.extend([n // factor, factor])
    blocks = values.reshape(shape + [values.shape[-1]])
    return blocks.mean(axis=tuple(range(1, 2 * len(cells), 2)))


def eoc(rows: Sequence[EocRow], case: str = "", components: Optional[List[str]] = None) -> EocTable:
    """
    Experimental orders of convergence between consecutive rows.

    order_k = log(e_{k-1} / e_k) / log(dx_{k-1} / dx_k), per component.
    """
    rows = list(rows)
    if len(rows) < 2:
        raise EocUndefinedError("at least two grids are needed for a convergence order")
    for prev, row in zip(rows, rows[1:]):
        if not row.dx < prev.dx:
            raise EocUndefinedError("grid spacing must decrease strictly down the table")

    p = len(rows[0].errors)
    if components is None:
        components = [f"comp_{k}" for k in range(p)]
    table_rows = [EocRow(n=rows[0].n, dx=rows[0].dx, errors=list(rows[0].errors), orders=None)]
    for prev, row in zip(rows, rows[1:]):
        orders = []
        for e_prev, e in zip(prev.errors, row.errors):
            if e_prev > 0.0 and e > 0.0:
                orders.append(float(np.log(e_prev / e) / np.log(prev.dx / row.dx)))
            else:
                logger.warning(f"Order undefined between n={prev.n} and n={row.n} (zero error)")
                orders.append(float("nan"))
        table_rows.append(EocRow(n=row.n, dx=row.dx, errors=list(row.errors), orders=orders))
    return EocTable(case=case, components=components, rows=table_rows)


def ec_residual_audit(
    model: ModelSpec,
    vset: VelocitySet,
    field: Field,
    d: int,
    scheme: SchemeKind = SchemeKind.EC,
) -> float:
    """
    Largest |[[chi_m]] - [[V]] . flux_m| over the interfaces normal to d and all m.

    The field must have its ghosts filled.
    """
    req = interface_request(model, field.grid, field.values, d)
    flux = interface_flux(scheme, model, vset, req)
    return float(np.max(np.abs(ec_residual(model, vset, req, flux))))


def dissipation_audit(
    model: ModelSpec,
    vset: VelocitySet,
    field: Field,
    d: int,
    scheme: SchemeKind = SchemeKind.ES1,
) -> float:
    """
    Smallest characteristic dissipation product lambda_k w_k W_k over interfaces.

    W is the raw characteristic jump for ES1 and the reconstructed one for the
    second-order schemes; entropy stability requires every product >= 0.
    """
    req = interface_request(model, field.grid, field.values, d)
    R, speeds = dissipation_basis(model, req)
    w, W = characteristic_jumps(scheme, R, req)
    return float(np.min(speeds * w * W))
