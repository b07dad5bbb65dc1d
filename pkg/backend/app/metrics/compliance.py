from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Set

import numpy as np
from scipy import ndimage

from ..config import get_settings
from ..errors import NumericError, SolveError
from ..fea.grid import adjacent_elements
from ..fea.solver import solve_system
from ..models import GridDomain, LoadCase, MaterialModel
from .pixelwise import check_pair

logger = logging.getLogger(__name__)

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class ComplianceOutcome:
    """Compliance error of one prediction; ``unstable`` when its solve failed."""

    error: Optional[float]
    unstable: bool = False
    reason: str = ""


def _labels_at(labels: np.ndarray, grid: GridDomain, nodes: Iterable[int]) -> Set[int]:
    return {int(labels[ey, ex]) for n in nodes for ey, ex in adjacent_elements(grid, int(n)) if labels[ey, ex]}


def has_load_path(rho, grid: GridDomain, lc: LoadCase, void_threshold: Optional[float] = None) -> bool:
    """True when every loaded node reaches a supported node through non-void material.

    Material is the set of elements denser than ``void_threshold``, connected
    through edges and corners. Force components on fixed DOFs do not count.
    """
    threshold = get_settings().void_threshold if void_threshold is None else void_threshold
    f = lc.force_vector(grid)
    fixed = np.asarray(lc.fixed_dofs, dtype=np.int64)
    f[fixed] = 0.0
    loaded = np.unique(np.flatnonzero(f) // 2)
    if loaded.size == 0:
        return True
    labels, _ = ndimage.label(np.asarray(rho) > threshold, structure=EIGHT_CONNECTED)
    supported = _labels_at(labels, grid, np.unique(fixed // 2))
    return all(_labels_at(labels, grid, [n]) & supported for n in loaded)


def compliance_error(pred, truth, grid: GridDomain, mat: MaterialModel, lc: LoadCase) -> float:
    """|C(pred) - C(truth)| / C(truth) on continuous densities.

    Raises ``SolveError`` when the predicted structure cannot carry the load:
    no material path from a loaded node to a support, or a failed solve.
    """
    p, t = check_pair(pred, truth)
    if not has_load_path(p, grid, lc):
        raise SolveError("no load path: a loaded node is cut off from every support")
    c_true = solve_system(grid, t, mat, lc).compliance_per_element.sum()
    c_pred = solve_system(grid, p, mat, lc).compliance_per_element.sum()
    if c_true <= 0.0:
        if c_pred == 0.0:
            return 0.0
        raise NumericError("reference structure has zero compliance")
    return float(np.abs(c_pred - c_true) / c_true)


def compliance_outcome(pred, truth, grid: GridDomain, mat: MaterialModel, lc: LoadCase) -> ComplianceOutcome:
    try:
        return ComplianceOutcome(error=compliance_error(pred, truth, grid, mat, lc))
    except (SolveError, NumericError) as exc:
        logger.warning("[metrics.compliance] unstable: %s", exc)
        return ComplianceOutcome(error=None, unstable=True, reason=str(exc))
