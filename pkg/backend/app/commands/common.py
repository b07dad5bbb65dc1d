from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Dict, List, Optional

from ..config import RunConfig, get_settings
from ..errors import ParameterError
from ..schemas import RunRecord

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

RUN_RECORD = "run.json"


def add_common(parser: argparse.ArgumentParser, jobs: bool = False) -> None:
    parser.add_argument("--config", dest="config_path", default=None, help="flat TOML run configuration")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    if jobs:
        parser.add_argument("--jobs", type=int, default=None, help="worker processes (default 1)")


def add_material_and_simp(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--volfrac", type=float, default=None)
    parser.add_argument("--rmin", type=float, default=None)
    parser.add_argument("--penal", type=float, default=None)
    parser.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    parser.add_argument("--nu", type=float, default=None)


def require_out(cfg: RunConfig) -> Path:
    if not cfg.out:
        raise ParameterError("out: an output directory is required (--out)")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_run_record(
    cfg: RunConfig,
    exit_code: int,
    outputs: Optional[Dict[str, str]] = None,
    notes: Optional[List[str]] = None,
) -> Optional[Path]:
    """Echo the resolved configuration and the run outcome to ``run.json``."""
    if not cfg.out:
        return None
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    record = RunRecord(
        app=get_settings().app_name,
        command=cfg.command,
        exit_code=exit_code,
        config=cfg.model_dump(mode="json"),
        outputs=outputs or {},
        notes=notes or [],
    )
    path = out / RUN_RECORD
    data = json.loads(record.model_dump_json())
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
