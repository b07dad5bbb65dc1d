from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from ..models import BcTemplate, Force, GridDomain, LoadCase, SamplingConfig

_EPS = 1e-12


def admissible_nodes(template: BcTemplate, grid: GridDomain) -> np.ndarray:
    """Nodes inside the template's force region that are not fully fixed."""
    region = template.force_region
    ix, iy = np.meshgrid(np.arange(grid.nelx + 1), np.arange(grid.nely + 1), indexing="ij")
    ix, iy = ix.ravel(), iy.ravel()
    x = ix / grid.nelx
    y = (grid.nely - iy) / grid.nely
    inside = (
        (x >= region.x_lo - _EPS) & (x <= region.x_hi + _EPS)
        & (y >= region.y_lo - _EPS) & (y <= region.y_hi + _EPS)
    )
    nodes = (grid.nely + 1) * ix + iy
    fixed = set(template.fixed_dofs(grid))
    free = np.array([not (2 * n in fixed and 2 * n + 1 in fixed) for n in nodes])
    return np.sort(nodes[inside & free])


def sample_load_case(
    rng: np.random.Generator, template: BcTemplate, grid: GridDomain, config: SamplingConfig
) -> LoadCase:
    """Draw ``config.n_forces`` independent point loads for one template.

    Each load picks a node uniformly over the admissible set, then Fx and Fy
    uniformly in ``config.force_range``.
    """
    nodes = admissible_nodes(template, grid)
    if nodes.size == 0:
        raise ParameterError(f"template {template.id!r} has no admissible load node on this grid")
    lo, hi = config.force_range
    forces = []
    for _ in range(config.n_forces):
        node = int(nodes[rng.integers(nodes.size)])
        fx, fy = rng.uniform(lo, hi, size=2)
        forces.append(Force(node=node, fx=float(fx), fy=float(fy)))
    return LoadCase(forces=forces, fixed_dofs=template.fixed_dofs(grid), bc_template_id=template.id)
