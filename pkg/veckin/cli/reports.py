"""
CSV report writers.

All floats are written with 17 significant digits so identical runs give
byte-identical files.
"""

from pathlib import Path
from typing import List, Optional, Sequence
import logging

import pandas as pd

from ..models import AuditCheck, EntropyReport, EocTable, RunManifest
from ..services.grid import Field

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _write(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {path}")
    return path


def solution_frame(field: Field) -> pd.DataFrame:
    """One row per interior cell in row-major order: x[, y], comp_0 .. comp_{p-1}"""
    grid = field.grid
    centers = grid.cell_centers().reshape(-1, grid.dim)
    values = field.interior.reshape(-1, field.p)
    columns = {}
    for d, name in zip(range(grid.dim), ("x", "y")):
        columns[name] = centers[:, d]
    for k in range(field.p):
        columns[f"comp_{k}"] = values[:, k]
    return pd.DataFrame(columns)


def entropy_frame(report: EntropyReport, every: int = 1) -> pd.DataFrame:
    """t, eta_mean, H_1..H_M, signed_eta, abs_eta, signed_H_1.., abs_H_1.."""
    M = len(report.H_mean[0]) if report.H_mean else 0
    columns = {"t": report.times, "eta_mean": report.eta_mean}
    for m in range(M):
        columns[f"H_{m + 1}"] = [row[m] for row in report.H_mean]
    columns["signed_eta"] = report.signed_eta
    columns["abs_eta"] = report.abs_eta
    for m in range(M):
        columns[f"signed_H_{m + 1}"] = [row[m] for row in report.signed_H]
    for m in range(M):
        columns[f"abs_H_{m + 1}"] = [row[m] for row in report.abs_H]
    frame = pd.DataFrame(columns)
    return frame.iloc[::every] if every > 1 else frame


def eoc_frame(table: EocTable) -> pd.DataFrame:
    """n, dx, l2, order for scalar laws; one l2/order pair per component otherwise"""
    single = len(table.components) == 1
    records = []
    for row in table.rows:
        record = {"n": row.n, "dx": row.dx}
        for k, name in enumerate(table.components):
            suffix = "" if single else f"_{name}"
            record[f"l2{suffix}"] = row.errors[k]
            record[f"order{suffix}"] = None if row.orders is None else row.orders[k]
        records.append(record)
    return pd.DataFrame.from_records(records)


def audit_frame(checks: Sequence[AuditCheck]) -> pd.DataFrame:
    return pd.DataFrame.from_records([check.model_dump() for check in checks],
                                     columns=["name", "value", "threshold", "passed"])


def write_reports(
    manifest: RunManifest,
    field: Optional[Field] = None,
    report: Optional[EntropyReport] = None,
    eoc_table: Optional[EocTable] = None,
    checks: Optional[Sequence[AuditCheck]] = None,
) -> List[Path]:
    """
    Write whichever reports are available into manifest.out_dir.

    Returns:
        Paths of the files written
    """
    out_dir = Path(manifest.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if field is not None:
        written.append(_write(solution_frame(field), out_dir / "solution.csv"))
    if report is not None and report.n_samples:
        written.append(_write(entropy_frame(report, manifest.report_every), out_dir / "entropy.csv"))
    if eoc_table is not None:
        written.append(_write(eoc_frame(eoc_table), out_dir / "eoc.csv"))
    if checks is not None:
        written.append(_write(audit_frame(checks), out_dir / "audit.csv"))
    return written
