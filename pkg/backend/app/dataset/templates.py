from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from ..config import get_settings
from ..errors import ParameterError
from ..fea.grid import constraint_rank
from ..models import BcTemplate, GridDomain, Region, Support

BEAM_REGION = Region(x_lo=0.5, x_hi=1.0, y_lo=0.0, y_hi=1.0)

# Displacement BC templates; a and b are the training BCs, c-e the unseen ones.
BC_TEMPLATES: Dict[str, BcTemplate] = {
    "a": BcTemplate(
        id="a",
        description="cantilever, clamped left edge",
        supports=[Support(where="left", dofs="xy")],
        force_region=BEAM_REGION,
    ),
    "b": BcTemplate(
        id="b",
        description="simply supported, pin bottom-left and roller bottom-right",
        supports=[Support(where="bottom_left", dofs="xy"), Support(where="bottom_right", dofs="y")],
        force_region=BEAM_REGION,
    ),
    "c": BcTemplate(
        id="c",
        description="clamped left and right edges",
        supports=[Support(where="left", dofs="xy"), Support(where="right", dofs="xy")],
        force_region=BEAM_REGION,
    ),
    "d": BcTemplate(
        id="d",
        description="clamped bottom edge",
        supports=[Support(where="bottom", dofs="xy")],
        force_region=BEAM_REGION,
    ),
    "e": BcTemplate(
        id="e",
        description="clamped left edge, roller bottom-right",
        supports=[Support(where="left", dofs="xy"), Support(where="bottom_right", dofs="y")],
        force_region=BEAM_REGION,
    ),
    "mbb": BcTemplate(
        id="mbb",
        description="MBB half-beam, symmetry rollers on the left edge and a bottom-right support",
        supports=[Support(where="left", dofs="x"), Support(where="bottom_right", dofs="y")],
        force_region=Region(x_lo=0.0, x_hi=0.0, y_lo=1.0, y_hi=1.0),
    ),
}

SEEN_TEMPLATES = ("a", "b")
UNSEEN_TEMPLATES = ("c", "d", "e")


def bc_group(template_id: str) -> str:
    if template_id in SEEN_TEMPLATES:
        return "seen"
    if template_id in UNSEEN_TEMPLATES:
        return "unseen"
    return "other"


def _load_override(path: str) -> Dict[str, BcTemplate]:
    p = Path(path)
    if not p.exists():
        raise ParameterError(f"templates file not found: {p}")
    with p.open("rb") as fh:
        data = tomllib.load(fh)
    out: Dict[str, BcTemplate] = {}
    for tid, body in (data.get("templates") or {}).items():
        out[tid] = BcTemplate.model_validate({"id": tid, **body})
    return out


def load_templates(path: Optional[str] = None) -> Dict[str, BcTemplate]:
    """Built-in templates, overridden by ``path`` or ``TOPO_TEMPLATES_FILE``."""
    templates = dict(BC_TEMPLATES)
    path = path or get_settings().templates_file
    if path:
        templates.update(_load_override(path))
    return templates


def get_templates(ids: Iterable[str], grid: Optional[GridDomain] = None) -> List[BcTemplate]:
    """Resolve template ids, checking each constrains all rigid-body modes on ``grid``."""
    available = load_templates()
    out = []
    for tid in ids:
        if tid not in available:
            raise ParameterError(f"unknown BC template {tid!r}; known: {', '.join(sorted(available))}")
        template = available[tid]
        if grid is not None and constraint_rank(grid, template.fixed_dofs(grid)) < 3:
            raise ParameterError(f"template {tid!r} leaves rigid-body modes free on a {grid.nelx}x{grid.nely} grid")
        out.append(template)
    return out
