from .filter import filter_sensitivities
from .oc import oc_update
from .optimizer import OptimizationResult, iter_simp, run_simp
from .sensitivity import sensitivity_analysis

__all__ = [
    "OptimizationResult",
    "filter_sensitivities",
    "iter_simp",
    "oc_update",
    "run_simp",
    "sensitivity_analysis",
]
