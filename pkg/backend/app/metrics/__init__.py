from .compliance import ComplianceOutcome, compliance_error, compliance_outcome
from .evaluation import EvalJob, evaluate_datasets, evaluate_sample
from .loss import LossBreakdown, loss_breakdown, total_loss
from .pixelwise import binary_accuracy, binary_cross_entropy, mse, round_half_up
from .report import aggregate, format_table, write_json, write_metrics_csv, write_table_csv

__all__ = [
    "ComplianceOutcome",
    "EvalJob",
    "LossBreakdown",
    "aggregate",
    "binary_accuracy",
    "binary_cross_entropy",
    "compliance_error",
    "compliance_outcome",
    "evaluate_datasets",
    "evaluate_sample",
    "format_table",
    "loss_breakdown",
    "mse",
    "round_half_up",
    "total_loss",
    "write_json",
    "write_metrics_csv",
    "write_table_csv",
]
