#!/usr/bin/env python3
"""
Re-run the convergence studies of the benchmark cases and print the computed
orders next to the published ones.

Each study is written to <out>/<case>/eoc.csv, and a side-by-side comparison to
<out>/comparison.csv.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List

import pandas as pd

# Add parent directory to path to import solver modules
sys.path.insert(0, str(Path(__file__).parent.parent))

try:
    from veckin.cli.eoc import convergence_table
    from veckin.cli.reports import eoc_frame, write_reports
    from veckin.models import NormWeight, RunManifest
    from veckin.services.cases import build_case, step_config
    from veckin.settings import get_settings
except ImportError as e:
    print(f"Error importing solver modules: {e}")
    print("Make sure you're running this from the project root directory")
    sys.exit(1)


# Published orders per component, one entry per refinement step
PUBLISHED_ORDERS: Dict[str, Dict[str, List[float]]] = {
    "advection": {"U": [2.19, 2.47, 2.50]},
    "burgers": {"U": [1.89, 3.24]},
    "sw-periodic": {
        "rho": [2.10, 2.74, 2.89],
        "rho_u1": [2.82, 2.71, 2.92],
        "rho_u2": [2.82, 2.71, 2.92],
    },
    "sw-vortex": {
        "rho": [1.83, 1.11],
        "rho_u1": [2.75, 2.26],
        "rho_u2": [2.75, 2.60],
    },
}


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Reproduce the published convergence tables",
    )
    parser.add_argument(
        "--cases",
        nargs="+",
        choices=sorted(PUBLISHED_ORDERS),
        default=["advection", "burgers"],
        help="Cases to run (the 2D studies take a long time)",
    )
    parser.add_argument(
        "--norm",
        choices=[w.value for w in NormWeight],
        default=NormWeight.COUNT.value,
        help="L2 weight used for the error columns",
    )
    parser.add_argument(
        "--out",
        default="output/tables",
        help="Output directory",
    )
    return parser.parse_args()


def compare(case_name: str, table) -> pd.DataFrame:
    published = PUBLISHED_ORDERS[case_name]
    records = []
    for step, row in enumerate(table.rows[1:]):
        for k, component in enumerate(table.components):
            expected = published.get(component, [])
            records.append({
                "case": case_name,
                "n": row.n,
                "component": component,
                "order": row.orders[k],
                "published": expected[step] if step < len(expected) else None,
            })
    return pd.DataFrame.from_records(records)


def main() -> None:
    args = parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    settings = get_settings()
    out_dir = Path(args.out)
    frames = []

    for case_name in args.cases:
        case = build_case(case_name)
        print(f"Running {case_name} on grids {case.eoc_grids} ...")
        table = convergence_table(
            case, case.eoc_grids, step_config(case), threads=settings.threads, norm=NormWeight(args.norm)
        )
        manifest = RunManifest(command="eoc", case=case_name, out_dir=str(out_dir / case_name))
        write_reports(manifest, eoc_table=table)
        print(eoc_frame(table).to_string(index=False))
        frames.append(compare(case_name, table))

    comparison = pd.concat(frames, ignore_index=True)
    comparison["difference"] = comparison["order"] - comparison["published"]
    out_dir.mkdir(parents=True, exist_ok=True)
    comparison.to_csv(out_dir / "comparison.csv", index=False, float_format="%.6g")
    print()
    print(comparison.to_string(index=False))
    print(f"Done! Comparison written to {out_dir / 'comparison.csv'}")


if __name__ == "__main__":  # pragma: no cover - CLI utility
    main()
