from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

from ..errors import FormatError, ParameterError, TopoError
from ..simp.optimizer import run_simp
from .storage import read_manifest, read_sample

logger = logging.getLogger(__name__)

RESOLVE_MSE_TOL = 1e-6


@dataclass
class VerifyReport:
    count: int = 0
    checked_crc: int = 0
    resolved: List[int] = field(default_factory=list)
    resolve_mse: List[float] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def resolve_consistency(path: str | Path, index: int) -> float:
    """Re-run SIMP on a stored load case; MSE between the result and the stored target."""
    manifest = read_manifest(path)
    if manifest.generation is None or not manifest.has_target:
        raise ParameterError("dataset carries no generation settings or targets to re-solve")
    sample = read_sample(path, manifest, index)
    gen = manifest.generation
    result = run_simp(sample.grid, gen.material, sample.meta.load_case(), gen.simp)
    return float(np.mean((result.density - sample.target.astype(float)) ** 2))


def verify_dataset(path: str | Path, fraction: float = 0.01, seed: int = 0, tol: float = RESOLVE_MSE_TOL) -> VerifyReport:
    """Check every payload checksum and re-solve a seeded random subset."""
    if not 0.0 <= fraction <= 1.0:
        raise ParameterError(f"fraction must lie in [0, 1], got {fraction}")
    manifest = read_manifest(path)
    report = VerifyReport(count=manifest.count)
    for i in range(manifest.count):
        try:
            read_sample(path, manifest, i)
            report.checked_crc += 1
        except FormatError as exc:
            report.failures.append(str(exc))

    n_pick = int(np.ceil(fraction * manifest.count)) if manifest.count else 0
    if n_pick and manifest.has_target and manifest.generation is not None:
        rng = np.random.default_rng(seed)
        picks = np.sort(rng.choice(manifest.count, size=n_pick, replace=False))
        for i in picks:
            i = int(i)
            try:
                mse = resolve_consistency(path, i)
            except TopoError as exc:
                report.failures.append(f"sample {i}: {exc}")
                continue
            report.resolved.append(i)
            report.resolve_mse.append(mse)
            logger.info("[verify] sample=%d resolve_mse=%.3e", i, mse)
            if mse > tol:
                report.failures.append(f"sample {i}: re-solve MSE {mse:.3e} > {tol:.0e}")
    return report
