from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ..config import get_settings
from ..dataset.storage import read_manifest, read_sample
from ..errors import FormatError
from ..models import GridDomain, MaterialModel
from ..persistence import betti_at_threshold, compute_diagram
from ..scheduler import run_ordered
from ..schemas import DatasetManifest, MetricsRow, SampleMeta
from .compliance import compliance_outcome
from .loss import check_lambda, loss_breakdown
from .pixelwise import binary_accuracy, mse, round_half_up

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalJob:
    index: int
    pred: np.ndarray
    truth: np.ndarray
    meta: SampleMeta
    material: MaterialModel
    lambda_topo: float
    essential_penalty: float
    round_before_metrics: bool = False
    betti_threshold: float = 0.5


def evaluate_sample(job: EvalJob) -> MetricsRow:
    """All per-sample metrics of one (prediction, ground truth) pair."""
    pred = np.asarray(job.pred, dtype=float)
    truth = np.asarray(job.truth, dtype=float)
    nely, nelx = truth.shape
    grid = GridDomain(nelx=nelx, nely=nely)

    pm, tm = (round_half_up(pred), round_half_up(truth)) if job.round_before_metrics else (pred, truth)

    compliance, unstable = None, False
    if job.meta.fixed_dofs:
        outcome = compliance_outcome(pm, tm, grid, job.material, job.meta.load_case())
        compliance, unstable = outcome.error, outcome.unstable

    d_pred, d_truth = compute_diagram(pred), compute_diagram(truth)
    loss = loss_breakdown(
        pred, truth, job.lambda_topo, job.essential_penalty, pred_diagram=d_pred, truth_diagram=d_truth
    )
    bp = betti_at_threshold(d_pred, job.betti_threshold)
    bt = betti_at_threshold(d_truth, job.betti_threshold)

    return MetricsRow(
        index=job.index,
        bc_template_id=job.meta.bc_template_id,
        n_forces=job.meta.n_forces,
        mse=mse(pm, tm),
        binary_accuracy=binary_accuracy(pred, truth),
        compliance_error=compliance,
        unstable=unstable,
        bce=loss.bce,
        bottleneck_dim0=loss.bottleneck_dim0,
        bottleneck_dim1=loss.bottleneck_dim1,
        l_topology=loss.l_topology,
        total_loss=loss.total,
        betti0_error=abs(bp.b0 - bt.b0),
        betti1_error=abs(bp.b1 - bt.b1),
    )


def _check_alignment(pred: DatasetManifest, truth: DatasetManifest) -> None:
    if tuple(pred.resolution) != tuple(truth.resolution) and min(pred.count, truth.count) > 0:
        raise FormatError(f"prediction shape {tuple(pred.resolution)} != truth shape {tuple(truth.resolution)}", 0)
    if pred.count != truth.count:
        raise FormatError(
            f"{pred.count} predictions for {truth.count} ground truths", min(pred.count, truth.count)
        )
    if not truth.has_target:
        raise FormatError("ground-truth dataset has no target fields")


def _jobs(
    pred_path: Path,
    truth_path: Path,
    pred_manifest: DatasetManifest,
    truth_manifest: DatasetManifest,
    lambda_topo: float,
    essential_penalty: float,
    round_before_metrics: bool,
) -> Iterator[EvalJob]:
    gen = truth_manifest.generation
    settings = get_settings()
    material = gen.material if gen is not None else MaterialModel(
        e0=settings.e0, emin=settings.emin, nu=settings.nu, penal=settings.penal
    )
    for i in range(truth_manifest.count):
        p = read_sample(pred_path, pred_manifest, i)
        t = read_sample(truth_path, truth_manifest, i)
        pred = p.target if p.target is not None else p.channels[0]
        yield EvalJob(
            index=i,
            pred=pred,
            truth=t.target,
            meta=t.meta,
            material=material,
            lambda_topo=lambda_topo,
            essential_penalty=essential_penalty,
            round_before_metrics=round_before_metrics,
            betti_threshold=settings.betti_threshold,
        )


def evaluate_datasets(
    pred_path: str | Path,
    truth_path: str | Path,
    lambda_topo: Optional[float] = None,
    essential_penalty: Optional[float] = None,
    round_before_metrics: bool = False,
    jobs: int = 1,
) -> Tuple[List[MetricsRow], DatasetManifest]:
    """Evaluate index-aligned predictions against a ground-truth dataset.

    Raises ``FormatError`` naming the first sample whose count or shape does
    not line up, and re-raises per-sample errors with the sample index.
    """
    settings = get_settings()
    lambda_topo = check_lambda(lambda_topo)
    essential_penalty = settings.essential_penalty if essential_penalty is None else essential_penalty
    pred_path, truth_path = Path(pred_path), Path(truth_path)
    pred_manifest = read_manifest(pred_path)
    truth_manifest = read_manifest(truth_path)
    _check_alignment(pred_manifest, truth_manifest)

    items = _jobs(
        pred_path, truth_path, pred_manifest, truth_manifest, lambda_topo, essential_penalty, round_before_metrics
    )
    rows: List[MetricsRow] = []
    for index, row, err in run_ordered(evaluate_sample, items, jobs=jobs):
        if err is not None:
            if isinstance(err, FormatError) and err.sample_index is not None:
                raise err
            raise type(err)(f"sample {index}: {err}") from err
        logger.debug("[evaluate] sample=%d mse=%.4e ba=%.4f", index, row.mse, row.binary_accuracy)
        rows.append(row)
    logger.info("[evaluate] samples=%d", len(rows))
    return rows, truth_manifest
