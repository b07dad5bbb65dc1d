from __future__ import annotations

from functools import lru_cache
from typing import Iterable

import numpy as np

from ..models import GridDomain


@lru_cache(maxsize=32)
def element_dof_map(nelx: int, nely: int) -> np.ndarray:
    """(nelx*nely, 8) DOF indices per element, 88-line convention.

    Row ``e = nely * ex + ey``; columns are lower-left, lower-right,
    upper-right, upper-left node, x before y.
    """
    ex, ey = np.meshgrid(np.arange(nelx), np.arange(nely), indexing="ij")
    n1 = ((nely + 1) * ex + ey).ravel()  # upper-left node
    n2 = ((nely + 1) * (ex + 1) + ey).ravel()  # upper-right node
    edof = np.column_stack(
        [2 * n1 + 2, 2 * n1 + 3, 2 * n2 + 2, 2 * n2 + 3, 2 * n2, 2 * n2 + 1, 2 * n1, 2 * n1 + 1]
    ).astype(np.int64)
    edof.setflags(write=False)
    return edof


def to_element_vector(field: np.ndarray) -> np.ndarray:
    """nely x nelx field -> element-ordered vector."""
    return np.asarray(field).ravel(order="F")


def to_field(vec: np.ndarray, grid: GridDomain) -> np.ndarray:
    """Element-ordered vector -> nely x nelx field."""
    return np.asarray(vec).reshape(grid.nely, grid.nelx, order="F")


def node_position(grid: GridDomain, node: int) -> tuple[float, float]:
    """Physical (x, y) of a node, y pointing up, unit element size."""
    ix, iy = grid.node_coords(node)
    return float(ix), float(grid.nely - iy)


def constraint_rank(grid: GridDomain, fixed_dofs: Iterable[int]) -> int:
    """Number of independent rigid-body modes (of 3) suppressed by the constraints."""
    rows = []
    for dof in fixed_dofs:
        x, y = node_position(grid, int(dof) // 2)
        # rigid motion u = a - t*y, v = b + t*x
        rows.append([1.0, 0.0, -y] if dof % 2 == 0 else [0.0, 1.0, x])
    if not rows:
        return 0
    return int(np.linalg.matrix_rank(np.asarray(rows)))


def adjacent_elements(grid: GridDomain, node: int) -> list[tuple[int, int]]:
    """(ey, ex) of the elements sharing a node."""
    ix, iy = grid.node_coords(node)
    return [
        (ey, ex)
        for ex in (ix - 1, ix)
        for ey in (iy - 1, iy)
        if 0 <= ex < grid.nelx and 0 <= ey < grid.nely
    ]
