from __future__ import annotations

import argparse
import logging

from ..config import RunConfig
from ..errors import ParameterError
from ..metrics import aggregate, evaluate_datasets, format_table, write_json, write_metrics_csv, write_table_csv
from .common import EXIT_OK, add_common, require_out, write_run_record

logger = logging.getLogger(__name__)

NAME = "evaluate"


def register(subparsers) -> None:
    p: argparse.ArgumentParser = subparsers.add_parser(NAME, help="score predictions against a dataset")
    add_common(p, jobs=True)
    p.add_argument("--predictions", default=None, help="prediction container, index-aligned with --dataset")
    p.add_argument("--dataset", default=None, help="ground-truth dataset directory")
    p.add_argument("--lambda", dest="lambda_topo", type=float, default=None, help="topology loss weight (0.1)")
    p.add_argument("--essential-penalty", dest="essential_penalty", type=float, default=None)
    p.add_argument(
        "--round-before-metrics",
        dest="round_before_metrics",
        action="store_true",
        default=None,
        help="round densities before MSE and compliance",
    )


def run(cfg: RunConfig) -> int:
    if not cfg.predictions or not cfg.dataset:
        raise ParameterError("predictions, dataset: both --predictions and --dataset are required")
    out = require_out(cfg)
    rows, manifest = evaluate_datasets(
        cfg.predictions,
        cfg.dataset,
        lambda_topo=cfg.lambda_topo,
        essential_penalty=cfg.essential_penalty,
        round_before_metrics=cfg.round_before_metrics,
        jobs=cfg.jobs,
    )
    summary = aggregate(rows, tuple(manifest.resolution), cfg.lambda_topo)
    write_metrics_csv(rows, out / "metrics.csv")
    write_json(summary, out / "summary.json")
    write_table_csv(summary, out / "table.csv")
    notes = [f"{summary.n_unstable} unstable compliance solves"] if summary.n_unstable else []
    write_run_record(
        cfg, EXIT_OK, {"metrics": "metrics.csv", "summary": "summary.json", "table": "table.csv"}, notes
    )
    logger.info("[evaluate] summary\n%s", format_table(summary))
    return EXIT_OK
