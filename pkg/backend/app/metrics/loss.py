from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..config import get_settings
from ..errors import ParameterError
from ..persistence import PersistenceDiagram, bottleneck_distance, compute_diagram
from .pixelwise import binary_cross_entropy


@dataclass(frozen=True)
class LossBreakdown:
    bce: float
    bottleneck_dim0: float
    bottleneck_dim1: float
    lambda_topo: float

    @property
    def l_topology(self) -> float:
        return self.bottleneck_dim0 + self.bottleneck_dim1

    @property
    def total(self) -> float:
        if self.lambda_topo == 0.0:
            return self.bce
        return self.bce + self.lambda_topo * self.l_topology


def check_lambda(lam: Optional[float]) -> float:
    lam = get_settings().lambda_topo if lam is None else float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def topology_distances(
    pred_diagram: PersistenceDiagram,
    truth_diagram: PersistenceDiagram,
    essential_penalty: Optional[float] = None,
) -> tuple[float, float]:
    """Bottleneck distances in dimensions 0 and 1 with a finite essential penalty."""
    if essential_penalty is None:
        essential_penalty = get_settings().essential_penalty
    return (
        bottleneck_distance(pred_diagram, truth_diagram, 0, essential_penalty),
        bottleneck_distance(pred_diagram, truth_diagram, 1, essential_penalty),
    )


def loss_breakdown(
    pred,
    truth,
    lam: Optional[float] = None,
    essential_penalty: Optional[float] = None,
    pred_diagram: Optional[PersistenceDiagram] = None,
    truth_diagram: Optional[PersistenceDiagram] = None,
) -> LossBreakdown:
    lam = check_lambda(lam)
    bce = binary_cross_entropy(pred, truth)
    pred_diagram = pred_diagram or compute_diagram(pred)
    truth_diagram = truth_diagram or compute_diagram(truth)
    b0, b1 = topology_distances(pred_diagram, truth_diagram, essential_penalty)
    return LossBreakdown(bce=bce, bottleneck_dim0=b0, bottleneck_dim1=b1, lambda_topo=lam)


def total_loss(pred, truth, lam: Optional[float] = None, essential_penalty: Optional[float] = None) -> float:
    """Binary cross-entropy plus ``lam`` times the summed dim-0/dim-1 bottleneck distances."""
    return loss_breakdown(pred, truth, lam, essential_penalty).total
