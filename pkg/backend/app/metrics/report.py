"""Aggregation of per-sample metrics into summary tables.

Compliance means and standard deviations (population, ddof=0) cover the
rows with a stable compliance solve only; unstable rows are counted in
``n_unstable``.
"""

from __future__ import annotations

import csv
import json
import math
from itertools import groupby
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..dataset.templates import bc_group
from ..schemas import MetricsRow, MetricsSummary, ScenarioSummary, TableRow

METRICS_COLUMNS = list(MetricsRow.model_fields)
TABLE_COLUMNS = list(TableRow.model_fields)


def _mean(values: Sequence[float]) -> float:
    return float(np.mean(values)) if len(values) else math.nan


def _compliance_stats(rows: Sequence[MetricsRow]) -> Tuple[float, float]:
    values = [r.compliance_error for r in rows if r.compliance_error is not None and not r.unstable]
    if not values:
        return math.nan, math.nan
    return float(np.mean(values)), float(np.std(values, ddof=0))


def format_resolution(resolution: Tuple[int, int]) -> str:
    nely, nelx = resolution
    return f"{nely}x{nelx}"


def table_row(rows: Sequence[MetricsRow], resolution: Tuple[int, int]) -> dict:
    c_mean, c_std = _compliance_stats(rows)
    return dict(
        resolution=format_resolution(resolution),
        n_cases=len(rows),
        mse=_mean([r.mse for r in rows]),
        binary_accuracy=_mean([r.binary_accuracy for r in rows]),
        compliance_error=c_mean,
        compliance_error_std=c_std,
    )


def scenario_key(row: MetricsRow) -> Tuple[str, int]:
    return bc_group(row.bc_template_id), row.n_forces


def scenarios(rows: Sequence[MetricsRow], resolution: Tuple[int, int]) -> List[ScenarioSummary]:
    """Table columns per (BC group, force count)."""
    out = []
    for (group, n_forces), members in groupby(sorted(rows, key=scenario_key), key=scenario_key):
        members = list(members)
        out.append(ScenarioSummary(bc_group=group, n_forces=n_forces, **table_row(members, resolution)))
    return out


def aggregate(rows: Sequence[MetricsRow], resolution: Tuple[int, int], lambda_topo: float) -> MetricsSummary:
    return MetricsSummary(
        **table_row(rows, resolution),
        n_unstable=sum(1 for r in rows if r.unstable),
        bce=_mean([r.bce for r in rows]),
        l_topology=_mean([r.l_topology for r in rows]),
        total_loss=_mean([r.total_loss for r in rows]),
        bottleneck_dim0=_mean([r.bottleneck_dim0 for r in rows]),
        bottleneck_dim1=_mean([r.bottleneck_dim1 for r in rows]),
        betti0_error=_mean([r.betti0_error for r in rows]),
        betti1_error=_mean([r.betti1_error for r in rows]),
        lambda_topo=lambda_topo,
        scenarios=scenarios(rows, resolution),
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Iterable, columns: List[str], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_cell(data[c]) for c in columns])


def write_metrics_csv(rows: Sequence[MetricsRow], path: str | Path) -> None:
    write_csv(rows, METRICS_COLUMNS, path)


def write_table_csv(summary: MetricsSummary, path: str | Path) -> None:
    """Overall row followed by one row per scenario."""
    columns = ["bc_group", "n_forces"] + TABLE_COLUMNS
    overall = ScenarioSummary(bc_group="all", n_forces=0, **summary.model_dump(include=set(TABLE_COLUMNS)))
    write_csv([overall, *summary.scenarios], columns, path)


def write_json(model, path: str | Path) -> None:
    """Sorted-key JSON; NaN values become null."""
    data = json.loads(model.model_dump_json())
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def format_table(summary: MetricsSummary) -> str:
    header = f"{'group':<8}{'forces':>7}{'cases':>7}{'MSE':>11}{'BA':>9}{'C.err':>10}{'C.std':>10}"
    lines = [header]
    overall = ScenarioSummary(bc_group="all", n_forces=0, **summary.model_dump(include=set(TABLE_COLUMNS)))
    for s in [overall, *summary.scenarios]:
        lines.append(
            f"{s.bc_group:<8}{s.n_forces or '-':>7}{s.n_cases:>7}{s.mse:>11.4e}{s.binary_accuracy:>9.4f}"
            f"{s.compliance_error:>10.4f}{s.compliance_error_std:>10.4f}"
        )
    return "\n".join(lines)
