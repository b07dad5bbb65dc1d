from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from ..errors import ParameterError
from .diagram import PersistenceDiagram


@dataclass(frozen=True)
class BettiProfile:
    threshold: float
    b0: int
    b1: int


def _count(pairs: np.ndarray, essential: np.ndarray, t: float) -> int:
    alive = int(np.count_nonzero((pairs[:, 0] >= t) & (t > pairs[:, 1]))) if pairs.size else 0
    return alive + int(np.count_nonzero(essential >= t))


def betti_at_threshold(diagram: PersistenceDiagram, t: float) -> BettiProfile:
    """Component and hole counts of the superlevel set ``{field >= t}``."""
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"threshold must lie in [0, 1], got {t}")
    return BettiProfile(
        threshold=float(t),
        b0=_count(diagram.dim0, diagram.essential0, t),
        b1=_count(diagram.dim1, diagram.essential1, t),
    )


def betti_curve(diagram: PersistenceDiagram, thresholds: Iterable[float]) -> List[BettiProfile]:
    return [betti_at_threshold(diagram, t) for t in thresholds]
