from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.sparse import coo_matrix, csc_matrix
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from ..config import get_settings
from ..errors import ParameterError, SolveError
from ..models import GridDomain, LoadCase, MaterialModel, check_density
from .element import (
    centroid_strain_matrix,
    constitutive_matrix,
    element_stiffness,
    strain_energy_density,
    von_mises,
)
from .grid import constraint_rank, element_dof_map, to_element_vector, to_field

logger = logging.getLogger(__name__)


@dataclass
class SolutionFields:
    displacements: np.ndarray  # (n_dofs,)
    compliance_per_element: np.ndarray  # nely x nelx, E_e * u_e^T k0 u_e
    von_mises: np.ndarray
    strain_energy_density: np.ndarray
    total_compliance: float
    # u_e^T k0 u_e, the unit-modulus element energy used by the sensitivities
    element_energy: np.ndarray
    stress: np.ndarray  # 3 x nely x nelx: sx, sy, sxy
    strain: np.ndarray  # 3 x nely x nelx: ex, ey, gamma_xy


def assemble_stiffness(grid: GridDomain, rho: np.ndarray, mat: MaterialModel) -> csc_matrix:
    """Global K with element moduli E_e(rho_e)."""
    edof = element_dof_map(grid.nelx, grid.nely)
    ke = element_stiffness(mat.nu)
    moduli = mat.modulus(to_element_vector(rho))
    ik = np.repeat(edof, 8, axis=1).ravel()
    jk = np.tile(edof, (1, 8)).ravel()
    sk = (ke.ravel()[None, :] * moduli[:, None]).ravel()
    return coo_matrix((sk, (ik, jk)), shape=(grid.n_dofs, grid.n_dofs)).tocsc()


@dataclass(frozen=True)
class ReducedPattern:
    """COO triplets of K restricted to the free DOFs of one (grid, supports) pair."""

    free: np.ndarray
    keep: np.ndarray  # mask over the n_elements*64 element triplets
    rows: np.ndarray
    cols: np.ndarray
    constraint_rank: int


@lru_cache(maxsize=32)
def reduced_pattern(grid: GridDomain, fixed_dofs: Tuple[int, ...]) -> ReducedPattern:
    edof = element_dof_map(grid.nelx, grid.nely)
    free = np.setdiff1d(np.arange(grid.n_dofs), np.asarray(fixed_dofs, dtype=np.int64))
    position = np.full(grid.n_dofs, -1, dtype=np.int64)
    position[free] = np.arange(free.size)
    ik = position[np.repeat(edof, 8, axis=1).ravel()]
    jk = position[np.tile(edof, (1, 8)).ravel()]
    keep = (ik >= 0) & (jk >= 0)
    for a in (free, keep, ik, jk):
        a.setflags(write=False)
    return ReducedPattern(
        free=free, keep=keep, rows=ik[keep], cols=jk[keep], constraint_rank=constraint_rank(grid, fixed_dofs)
    )


def assemble_reduced(pattern: ReducedPattern, rho: np.ndarray, mat: MaterialModel) -> csc_matrix:
    """K_free assembled directly on the free DOFs."""
    ke = element_stiffness(mat.nu)
    moduli = mat.modulus(to_element_vector(rho))
    sk = (ke.ravel()[None, :] * moduli[:, None]).ravel()[pattern.keep]
    n = pattern.free.size
    return coo_matrix((sk, (pattern.rows, pattern.cols)), shape=(n, n)).tocsc()


def _solve_reduced(k_free: csc_matrix, f_free: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            # symmetric ordering suits the SPD stiffness
            u_free = spsolve(k_free, f_free, permc_spec="MMD_AT_PLUS_A")
        except (MatrixRankWarning, RuntimeError) as exc:
            raise SolveError(f"singular constrained system: {exc}") from exc
    u_free = np.atleast_1d(np.asarray(u_free, dtype=float))
    if not np.all(np.isfinite(u_free)):
        raise SolveError("non-finite displacements")
    return u_free


def solve_system(grid: GridDomain, rho, mat: MaterialModel, lc: LoadCase) -> SolutionFields:
    """Assemble, eliminate fixed DOFs, solve KU = F and recover element fields."""
    rho = check_density(rho, grid.shape, name="rho")
    lc.validate_for(grid)
    pattern = reduced_pattern(grid, tuple(sorted(int(d) for d in lc.fixed_dofs)))
    if pattern.constraint_rank < 3:
        raise SolveError("insufficient constraints: rigid-body motion is not suppressed")

    f = lc.force_vector(grid)
    if not np.all(np.isfinite(f)):
        raise ParameterError("non-finite force vector")
    free = pattern.free

    u = np.zeros(grid.n_dofs)
    f_free = f[free]
    if np.any(f_free != 0.0):
        k_free = assemble_reduced(pattern, rho, mat)
        u_free = _solve_reduced(k_free, f_free)
        residual = np.linalg.norm(k_free @ u_free - f_free) / np.linalg.norm(f_free)
        tol = get_settings().residual_tol
        if residual > tol:
            raise SolveError(f"relative residual {residual:.3e} exceeds {tol:.1e}")
        u[free] = u_free

    fields = _element_fields(grid, rho, mat, u)
    logger.debug("[fea.solve] free_dofs=%d compliance=%.6e", free.size, fields.total_compliance)
    return fields


def _element_fields(grid: GridDomain, rho: np.ndarray, mat: MaterialModel, u: np.ndarray) -> SolutionFields:
    edof = element_dof_map(grid.nelx, grid.nely)
    ke = element_stiffness(mat.nu)
    ue = u[edof]
    energy = np.einsum("ij,jk,ik->i", ue, ke, ue)
    moduli = mat.modulus(to_element_vector(rho))
    ce = moduli * energy

    strain = ue @ centroid_strain_matrix().T  # ex, ey, gamma_xy
    stress = moduli[:, None] * (strain @ constitutive_matrix(mat.nu).T)
    sx, sy, sxy = stress.T
    ex, ey, gxy = strain.T
    vm = von_mises(sx, sy, sxy)
    w = strain_energy_density(sx, sy, sxy, ex, ey, gxy / 2.0)

    return SolutionFields(
        displacements=u,
        compliance_per_element=to_field(ce, grid),
        von_mises=to_field(vm, grid),
        strain_energy_density=to_field(w, grid),
        total_compliance=float(ce.sum()),
        element_energy=to_field(energy, grid),
        stress=np.stack([to_field(c, grid) for c in (sx, sy, sxy)]),
        strain=np.stack([to_field(c, grid) for c in (ex, ey, gxy)]),
    )
