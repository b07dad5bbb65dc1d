from .betti import BettiProfile, betti_at_threshold, betti_curve
from .bottleneck import bottleneck_distance, essential_distance, finite_bottleneck
from .diagram import PersistenceDiagram, compute_diagram, write_diagram_csv

__all__ = [
    "BettiProfile",
    "PersistenceDiagram",
    "betti_at_threshold",
    "betti_curve",
    "bottleneck_distance",
    "compute_diagram",
    "essential_distance",
    "finite_bottleneck",
    "write_diagram_csv",
]
