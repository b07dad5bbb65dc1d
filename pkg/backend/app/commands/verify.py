from __future__ import annotations

import argparse
import json
import logging
from dataclasses import asdict
from pathlib import Path

from ..config import RunConfig
from ..dataset.verify import verify_dataset
from ..errors import ParameterError
from .common import EXIT_ERROR, EXIT_OK, add_common, write_run_record

logger = logging.getLogger(__name__)

NAME = "verify"


def register(subparsers) -> None:
    p: argparse.ArgumentParser = subparsers.add_parser(NAME, help="check checksums and re-solve a sample subset")
    add_common(p)
    p.add_argument("--dataset", default=None)
    p.add_argument("--fraction", type=float, default=None, help="share of samples to re-solve (0.01)")


def run(cfg: RunConfig) -> int:
    if not cfg.dataset:
        raise ParameterError("dataset: a dataset directory is required (--dataset)")
    report = verify_dataset(cfg.dataset, fraction=cfg.fraction, seed=cfg.seed)
    code = EXIT_OK if report.ok else EXIT_ERROR
    for failure in report.failures:
        logger.error("[verify] %s", failure)
    logger.info(
        "[verify] count=%d crc_ok=%d resolved=%d failures=%d",
        report.count, report.checked_crc, len(report.resolved), len(report.failures),
    )
    if cfg.out:
        write_run_record(cfg, code, {"verify": "verify.json"}, report.failures)
        text = json.dumps({**asdict(report), "ok": report.ok}, indent=2, sort_keys=True)
        (Path(cfg.out) / "verify.json").write_text(text + "\n", encoding="utf-8")
    return code
