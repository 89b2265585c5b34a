"""
`eoc` subcommand: grid-refinement study against an exact or self-convergence reference.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List
import logging

import numpy as np

from ..errors import DomainError
from ..models import CaseConfig, EocRow, EocTable, ModelKind, NormWeight, ReferenceKind, RunManifest, StepConfig
from ..services.cases import build_case, with_grid
from ..services.diagnostics import eoc, l2_error, restrict
from ..services.grid import Field
from ..services.integrator import run
from ..settings import Settings
from .reports import write_reports
from .run import resolve_config

logger = logging.getLogger(__name__)


def component_names(case: CaseConfig) -> List[str]:
    if case.model_kind in (ModelKind.SHALLOW_WATER_1D, ModelKind.SHALLOW_WATER_2D):
        return ["rho", "rho_u1", "rho_u2"][: 1 + case.dim]
    return ["U"]


def _solve(case: CaseConfig, n: int, config: StepConfig) -> Field:
    state, _ = run(with_grid(case, n), config)
    return state.U


def convergence_table(
    case: CaseConfig,
    grids: List[int],
    config: StepConfig,
    threads: int = 1,
    norm: NormWeight = NormWeight.COUNT,
) -> EocTable:
    """
    Run a case on every grid and tabulate L2 errors and orders.

    Grids run concurrently on up to `threads` workers; rows are ordered by
    grid size regardless of completion order.
    """
    grids = sorted(set(grids))
    if case.reference == ReferenceKind.NONE:
        raise DomainError(f"case {case.name} has no reference solution")
    runs = list(grids)
    if case.reference == ReferenceKind.SELF_CONVERGENCE:
        fine = case.reference_grid
        bad = [n for n in grids if fine % n or n >= fine]
        if bad:
            raise DomainError(f"grids {bad} do not divide the reference grid {fine}")
        runs.append(fine)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {n: pool.submit(_solve, case, n, config) for n in runs}
        solutions: Dict[int, Field] = {n: future.result() for n, future in futures.items()}

    rows = []
    for n in grids:
        field = solutions[n]
        if case.reference == ReferenceKind.EXACT:
            reference = case.exact_solution(field.grid.cell_centers(), config.t_end)
        else:
            reference = restrict(solutions[case.reference_grid].interior, case.reference_grid // n)
        errors = [float(e) for e in l2_error(field, reference, norm)]
        rows.append(EocRow(n=n, dx=field.grid.dx[0], errors=errors))
        logger.info(f"{case.name} n={n}: L2 errors {np.array2string(np.asarray(errors), precision=6)}")
    return eoc(rows, case=case.name, components=component_names(case))


def execute(manifest: RunManifest, settings: Settings) -> bool:
    case = build_case(manifest.case)
    grids = manifest.grids or case.eoc_grids
    config = resolve_config(manifest, case)
    table = convergence_table(case, grids, config, threads=settings.threads, norm=manifest.norm)
    write_reports(manifest, eoc_table=table)
    return True
