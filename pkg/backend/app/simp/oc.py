from __future__ import annotations

import numpy as np

from ..errors import NumericError
from ..models import SimpConfig

MAX_BRACKET_STEPS = 60
MAX_BISECTIONS = 200


def _candidate(rho: np.ndarray, dc: np.ndarray, lam: float, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return np.clip(rho * np.sqrt(-dc / lam), lower, upper)


def oc_update(rho, dc_filtered, config: SimpConfig) -> np.ndarray:
    """Optimality-criteria step with a bisection on the volume multiplier."""
    rho = np.asarray(rho, dtype=float)
    dc = np.minimum(np.asarray(dc_filtered, dtype=float), 0.0)
    move = config.move_limit
    lower = np.maximum(0.0, rho - move)
    upper = np.minimum(1.0, rho + move)
    target = config.volfrac * rho.size

    # attainable volume range over lam in (0, inf)
    reach_hi = np.where((dc < 0.0) & (rho > 0.0), upper, lower).sum()
    if target > reach_hi or target < lower.sum():
        raise NumericError(
            f"volume {config.volfrac} not attainable within the move limits "
            f"[{lower.mean():.4f}, {reach_hi / rho.size:.4f}]"
        )

    l1 = 0.0
    l2 = float(-dc.min()) or 1.0
    for _ in range(MAX_BRACKET_STEPS):
        if _candidate(rho, dc, l2, lower, upper).sum() <= target:
            break
        l2 *= 2.0
    else:
        raise NumericError(f"OC bisection bracket failed after {MAX_BRACKET_STEPS} expansions")

    for _ in range(MAX_BISECTIONS):
        lmid = 0.5 * (l1 + l2)
        if _candidate(rho, dc, lmid, lower, upper).sum() > target:
            l1 = lmid
        else:
            l2 = lmid
        if (l2 - l1) <= config.oc_tol * (l1 + l2):
            break
    else:
        raise NumericError("OC bisection did not converge")

    return _candidate(rho, dc, 0.5 * (l1 + l2), lower, upper)
