from __future__ import annotations

import numpy as np

from ..fea.solver import SolutionFields
from ..models import GridDomain, MaterialModel, check_density


def sensitivity_analysis(
    grid: GridDomain, rho, mat: MaterialModel, solution: SolutionFields
) -> np.ndarray:
    """Compliance gradient dc/drho_e = -p rho_e^(p-1) (E0 - Emin) u_e^T k0 u_e."""
    rho = check_density(rho, grid.shape, name="rho")
    dc = -mat.penal * rho ** (mat.penal - 1.0) * (mat.e0 - mat.emin) * solution.element_energy
    # element energies are >= 0 up to rounding
    return np.minimum(dc, 0.0)
