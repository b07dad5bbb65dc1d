from __future__ import annotations

import numpy as np

from ..fea.grid import adjacent_elements
from ..fea.solver import solve_system
from ..models import GridDomain, LoadCase, MaterialModel, SamplingConfig

CHANNEL_COUNT = 5


def force_channels(grid: GridDomain, lc: LoadCase) -> tuple[np.ndarray, np.ndarray]:
    """Rasterize nodal forces, each split equally among the node's elements."""
    fx = np.zeros(grid.shape)
    fy = np.zeros(grid.shape)
    for force in lc.forces:
        cells = adjacent_elements(grid, force.node)
        share = 1.0 / len(cells)
        for ey, ex in cells:
            fx[ey, ex] += force.fx * share
            fy[ey, ex] += force.fy * share
    return fx, fy


def encode_sample(grid: GridDomain, lc: LoadCase, mat: MaterialModel, config: SamplingConfig) -> np.ndarray:
    """Build the 5 x nely x nelx input tensor (float32).

    Channels: initial density, Fx map, Fy map, and the von Mises stress and
    strain-energy density of the uniform initial design.
    """
    rho0 = np.full(grid.shape, config.volfrac)
    fx, fy = force_channels(grid, lc)
    sol = solve_system(grid, rho0, mat, lc)
    channels = np.stack([rho0, fx, fy, sol.von_mises, sol.strain_energy_density])
    return channels.astype("<f4")
