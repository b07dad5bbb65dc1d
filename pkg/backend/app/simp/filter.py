from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from ..errors import ParameterError
from ..fea.grid import to_element_vector, to_field
from ..models import GridDomain

# lower clamp on rho_e in the filter denominator
RHO_FLOOR = 1e-3


@lru_cache(maxsize=16)
def filter_matrix(nelx: int, nely: int, rmin: float) -> tuple[csr_matrix, np.ndarray]:
    """Cone-weight matrix H (w = max(0, rmin - dist)) and its row sums."""
    reach = math.ceil(rmin) - 1
    ex, ey = np.meshgrid(np.arange(nelx), np.arange(nely), indexing="ij")
    ex, ey = ex.ravel(), ey.ravel()
    rows, cols, vals = [], [], []
    for dx in range(-reach, reach + 1):
        for dy in range(-reach, reach + 1):
            w = rmin - math.sqrt(dx * dx + dy * dy)
            if w <= 0.0:
                continue
            kx, ky = ex + dx, ey + dy
            ok = (kx >= 0) & (kx < nelx) & (ky >= 0) & (ky < nely)
            rows.append((nely * ex + ey)[ok])
            cols.append((nely * kx + ky)[ok])
            vals.append(np.full(int(ok.sum()), w))
    n = nelx * nely
    h = coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    hs = np.asarray(h.sum(axis=1)).ravel()
    return h, hs


def filter_sensitivities(grid: GridDomain, rho, dc, rmin: float) -> np.ndarray:
    """Mesh-independency sensitivity filter.

    dc_e <- sum_i w_i rho_i dc_i / (max(rho_e, 1e-3) * sum_i w_i)
    """
    if rmin <= 0.0:
        raise ParameterError(f"rmin must be > 0, got {rmin}")
    dc = np.asarray(dc, dtype=float)
    if rmin <= 1.0:
        # only the self weight survives
        return dc.copy()
    h, hs = filter_matrix(grid.nelx, grid.nely, float(rmin))
    x = to_element_vector(np.asarray(rho, dtype=float))
    d = to_element_vector(dc)
    out = (h @ (x * d)) / hs / np.maximum(RHO_FLOOR, x)
    return to_field(out, grid)
