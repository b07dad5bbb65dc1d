from __future__ import annotations

import argparse
import csv
import logging

import numpy as np

from ..config import RunConfig
from ..dataset.storage import read_field
from ..errors import ParameterError
from ..persistence import betti_curve, compute_diagram, write_diagram_csv
from .common import EXIT_OK, add_common, require_out, write_run_record

logger = logging.getLogger(__name__)

NAME = "persistence"
THRESHOLDS = np.round(np.arange(1, 10) * 0.1, 1)


def register(subparsers) -> None:
    p: argparse.ArgumentParser = subparsers.add_parser(NAME, help="persistence diagram of one stored field")
    add_common(p)
    p.add_argument("--field", default=None, help="field or dataset container")
    p.add_argument("--index", type=int, default=None, help="sample index (default 0)")


def run(cfg: RunConfig) -> int:
    if not cfg.field:
        raise ParameterError("field: a field container is required (--field)")
    out = require_out(cfg)
    diagram = compute_diagram(read_field(cfg.field, cfg.index))
    write_diagram_csv(diagram, out / "diagram.csv")
    profile = betti_curve(diagram, THRESHOLDS)
    with (out / "betti.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "b0", "b1"])
        for b in profile:
            writer.writerow([f"{b.threshold:.1f}", b.b0, b.b1])
    write_run_record(cfg, EXIT_OK, {"diagram": "diagram.csv", "betti": "betti.csv"})
    logger.info(
        "[persistence] dim0=%d dim1=%d essential=%d",
        len(diagram.dim0), len(diagram.dim1), len(diagram.essential0),
    )
    return EXIT_OK
