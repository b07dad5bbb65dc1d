from __future__ import annotations

import argparse
import logging

from ..config import RunConfig, get_settings
from ..dataset.generator import dataset_manifest, generate_dataset
from ..dataset.storage import write_dataset
from ..dataset.templates import get_templates
from ..models import SamplingConfig
from ..schemas import GenerationInfo
from .common import EXIT_OK, add_common, add_material_and_simp, require_out, write_run_record

logger = logging.getLogger(__name__)

NAME = "generate"
DEFAULT_RESOLUTION = (40, 80)


def register(subparsers) -> None:
    p: argparse.ArgumentParser = subparsers.add_parser(NAME, help="generate a SIMP ground-truth dataset")
    add_common(p, jobs=True)
    p.add_argument("--n", type=int, default=None, help="number of load cases")
    p.add_argument("--res", dest="resolution", default=None, help="ROWSxCOLS (default 40x80)")
    p.add_argument("--templates", default=None, help="comma-separated BC template ids (default a,b)")
    p.add_argument("--n-forces", dest="n_forces", type=int, default=None)
    p.add_argument("--augment", action="store_true", default=None, help="add x, y and xy mirrors")
    add_material_and_simp(p)


def generation_info(cfg: RunConfig) -> GenerationInfo:
    settings = get_settings()
    resolution = cfg.grid_shape(DEFAULT_RESOLUTION)
    sampling = SamplingConfig(
        force_range=(settings.force_min, settings.force_max),
        n_forces=cfg.n_forces,
        volfrac=cfg.volfrac,
        rmin=cfg.rmin,
        seed=cfg.seed,
        resolution=resolution,
        templates=cfg.templates,
    )
    return GenerationInfo(sampling=sampling, simp=cfg.simp(), material=cfg.material(), augment=cfg.augment)


def run(cfg: RunConfig) -> int:
    info = generation_info(cfg)
    get_templates(info.sampling.templates, info.sampling.grid)
    out = require_out(cfg)

    manifest = write_dataset(generate_dataset(info, cfg.n, jobs=cfg.jobs), dataset_manifest(info), out)
    stalled = [e.meta.index for e in manifest.samples if e.meta.converged is False]
    notes = [f"{len(stalled)} samples hit max_iters"] if stalled else []
    write_run_record(cfg, EXIT_OK, {"dataset": ".", "manifest": "manifest.json"}, notes)
    logger.info("[generate] count=%d not_converged=%d out=%s", manifest.count, len(stalled), out)
    return EXIT_OK
