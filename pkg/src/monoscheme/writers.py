"""CSV artifacts."""

from collections.abc import Iterable
from pathlib import Path

import numpy as np
import pandas as pd

from monoscheme.audit import ResidualReport
from monoscheme.harness import ConvergenceStudy, ViscosityStudy

FLOAT_FORMAT = "%.17g"


def _write(df: pd.DataFrame, path: Path, comments: Iterable[str] = ()) -> Path:
    """Write `df` with full precision, then append `# ` comment lines."""
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(
        path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n"
    )
    with path.open("a", newline="", encoding="utf-8") as csv_file:
        for comment in comments:
            csv_file.write(f"# {comment}\n")
    return path


def _format(value: float) -> str:
    return FLOAT_FORMAT % value


def write_study(study: ConvergenceStudy, path: Path) -> Path:
    """One row per level, then the fitted rate."""
    df = pd.DataFrame(
        {
            "dx": [level.dx for level in study.ladder],
            "dt": [level.dt for level in study.ladder],
            "n_cells": [level.n_cells for level in study.ladder],
            "l1_error": [level.l1_error for level in study.ladder],
            "pairwise_rate": [np.nan, *study.pairwise_rates],
        }
    )
    comments = [
        f"step_count[{i}]={level.step_count}" for i, level in enumerate(study.ladder)
    ]
    if study.preasymptotic:
        comments.append("preasymptotic=true")
    comments.append(f"fitted_rate={_format(study.fitted_rate)}")
    return _write(df, path, comments)


def write_viscosity_study(study: ViscosityStudy, path: Path) -> Path:
    """One row per viscosity, then the fitted rate in the viscosity."""
    df = pd.DataFrame(
        {
            "eta": study.etas,
            "l1_distance": study.distances,
            "pairwise_rate": [np.nan, *study.pairwise_rates],
        }
    )
    return _write(
        df,
        path,
        [
            f"fitted_rate={_format(study.fitted_rate)}",
            f"dx={_format(study.grid.dx)}",
            f"monotone={str(study.monotone).lower()}",
        ],
    )


def write_audit(report: ResidualReport, path: Path) -> Path:
    """One row per Kruzkov constant, then the summary."""
    df = pd.DataFrame(
        {
            "c": [row.c for row in report.per_constant],
            "worst_cell_index": [row.worst_cell_index for row in report.per_constant],
            "worst_value": [row.worst_value for row in report.per_constant],
            "pass": [str(row.passed).lower() for row in report.per_constant],
        }
    )
    return _write(
        df,
        path,
        [
            f"kind={report.kind}",
            f"eps={_format(report.eps)}",
            f"worst_violation={_format(report.worst_violation)}",
            f"tolerance={_format(report.tolerance_used)}",
            f"pass={str(report.passed).lower()}",
        ],
    )
