from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, List

import numpy as np

from ..fea.solver import solve_system
from ..models import GridDomain, LoadCase, MaterialModel, SimpConfig
from .filter import filter_sensitivities
from .oc import oc_update
from .sensitivity import sensitivity_analysis

logger = logging.getLogger(__name__)


@dataclass
class IterationState:
    iteration: int
    compliance: float
    volume: float
    change: float
    density: np.ndarray


@dataclass
class OptimizationResult:
    density: np.ndarray
    compliance_history: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    # compliance of the returned density, not of the last solved iterate
    compliance: float = float("nan")


def iter_simp(
    grid: GridDomain, mat: MaterialModel, lc: LoadCase, config: SimpConfig
) -> Iterator[IterationState]:
    """Generator variant: yields the state after every OC update.

    Each step solves the current design, filters the compliance gradient and
    applies one OC update; ``compliance`` is that of the design just solved.
    """
    mat = mat.model_copy(update={"penal": config.penal})
    rho = np.full(grid.shape, config.volfrac)
    for it in range(1, config.max_iters + 1):
        sol = solve_system(grid, rho, mat, lc)
        dc = sensitivity_analysis(grid, rho, mat, sol)
        dc = filter_sensitivities(grid, rho, dc, config.rmin)
        rho_new = oc_update(rho, dc, config)
        change = float(np.max(np.abs(rho_new - rho)))
        rho = rho_new
        yield IterationState(
            iteration=it,
            compliance=sol.total_compliance,
            volume=float(rho.mean()),
            change=change,
            density=rho,
        )


def run_simp(grid: GridDomain, mat: MaterialModel, lc: LoadCase, config: SimpConfig) -> OptimizationResult:
    result = OptimizationResult(density=np.full(grid.shape, config.volfrac))
    for state in iter_simp(grid, mat, lc, config):
        result.density = state.density
        result.compliance_history.append(state.compliance)
        result.iterations = state.iteration
        logger.debug(
            "[simp] it=%d c=%.4e vol=%.3f change=%.3f",
            state.iteration, state.compliance, state.volume, state.change,
        )
        if state.change < config.change_tol:
            result.converged = True
            break
    final = solve_system(grid, result.density, mat.model_copy(update={"penal": config.penal}), lc)
    result.compliance = final.total_compliance
    if not result.converged:
        logger.info("[simp] not converged after %d iterations", result.iterations)
    return result
