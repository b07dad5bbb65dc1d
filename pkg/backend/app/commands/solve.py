from __future__ import annotations

import argparse
import csv
import logging

from ..config import RunConfig
from ..dataset.storage import write_fields
from ..dataset.templates import get_templates
from ..errors import ParameterError
from ..models import Force, GridDomain, LoadCase
from ..schemas import SampleMeta
from ..simp.optimizer import run_simp
from ..visual import save_density_png
from .common import EXIT_NOT_CONVERGED, EXIT_OK, add_common, add_material_and_simp, require_out, write_run_record

logger = logging.getLogger(__name__)

NAME = "solve"


def register(subparsers) -> None:
    p: argparse.ArgumentParser = subparsers.add_parser(NAME, help="run SIMP on one load case")
    add_common(p)
    p.add_argument("--res", dest="resolution", default=None, help="ROWSxCOLS, e.g. 20x60")
    p.add_argument("--template", default=None, help="BC template id (a-e, mbb)")
    add_material_and_simp(p)
    p.add_argument("--png", action="store_true", default=None, help="also write density.png")


def build_load_case(cfg: RunConfig, grid: GridDomain) -> LoadCase:
    """Loads from ``loads``; supports from ``fixed_dofs`` or the template."""
    if not cfg.loads:
        raise ParameterError("loads: at least one [ix, iy, fx, fy] load is required")
    forces = [Force(node=grid.node_index(int(ix), int(iy)), fx=fx, fy=fy) for ix, iy, fx, fy in cfg.loads]
    if cfg.fixed_dofs:
        return LoadCase(forces=forces, fixed_dofs=cfg.fixed_dofs, bc_template_id="custom")
    template = get_templates([cfg.template], grid)[0]
    return LoadCase(forces=forces, fixed_dofs=template.fixed_dofs(grid), bc_template_id=template.id)


def run(cfg: RunConfig) -> int:
    nely, nelx = cfg.grid_shape()
    grid = GridDomain(nelx=nelx, nely=nely)
    lc = build_load_case(cfg, grid)
    out = require_out(cfg)

    result = run_simp(grid, cfg.material(), lc, cfg.simp())

    meta = SampleMeta(
        index=0,
        seed=cfg.seed,
        bc_template_id=lc.bc_template_id,
        forces=lc.forces,
        fixed_dofs=lc.fixed_dofs,
        n_forces=len(lc.forces),
        converged=result.converged,
        iterations=result.iterations,
        compliance=result.compliance,
    )
    write_fields([result.density], out / "density", metas=[meta])
    with (out / "history.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "compliance"])
        for it, c in enumerate(result.compliance_history, start=1):
            writer.writerow([it, repr(c)])

    outputs = {"density": "density", "history": "history.csv"}
    if cfg.png:
        save_density_png(result.density, out / "density.png")
        outputs["png"] = "density.png"

    code = EXIT_OK if result.converged else EXIT_NOT_CONVERGED
    notes = [] if result.converged else [f"not converged after {result.iterations} iterations"]
    write_run_record(cfg, code, outputs, notes)
    logger.info(
        "[solve] iters=%d converged=%s compliance=%.6e out=%s",
        result.iterations, result.converged, result.compliance, out,
    )
    return code
