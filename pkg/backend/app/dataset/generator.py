from __future__ import annotations

import logging
from typing import Iterator, Tuple

import numpy as np

from ..errors import TopoError
from ..scheduler import run_ordered
from ..schemas import DATASET_CHANNELS, DatasetManifest, GenerationInfo, SampleMeta
from ..simp.optimizer import run_simp
from .augment import mirror_augment
from .encoding import encode_sample
from .records import SampleRecord
from .sampling import sample_load_case
from .storage import new_manifest
from .templates import get_templates

logger = logging.getLogger(__name__)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per sample, derived from (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def generate_sample(job: Tuple[int, GenerationInfo]) -> SampleRecord:
    """Sample a load case, encode its inputs and solve its SIMP target."""
    index, info = job
    sampling = info.sampling
    grid = sampling.grid
    rng = sample_rng(sampling.seed, index)
    templates = get_templates(sampling.templates, grid)
    template = templates[int(rng.integers(len(templates)))]
    lc = sample_load_case(rng, template, grid, sampling)
    channels = encode_sample(grid, lc, info.material, sampling)
    result = run_simp(grid, info.material, lc, info.simp)
    meta = SampleMeta(
        index=index,
        seed=sampling.seed,
        bc_template_id=template.id,
        forces=lc.forces,
        fixed_dofs=lc.fixed_dofs,
        n_forces=len(lc.forces),
        converged=result.converged,
        iterations=result.iterations,
        compliance=result.compliance,
    )
    return SampleRecord(channels=channels, meta=meta, target=result.density)


def dataset_manifest(info: GenerationInfo) -> DatasetManifest:
    return new_manifest(info.sampling.resolution, DATASET_CHANNELS, has_target=True, generation=info)


def generate_dataset(info: GenerationInfo, n: int, jobs: int = 1) -> Iterator[SampleRecord]:
    """Yield ``n`` samples (``4n`` with augmentation) in deterministic order."""
    jobs_in = ((i, info) for i in range(n))
    produced = 0
    for index, sample, err in run_ordered(generate_sample, jobs_in, jobs=jobs):
        if err is not None:
            raise TopoError(f"sample {index}: {err}") from err
        logger.info(
            "[generate] sample=%d template=%s iters=%d converged=%s c=%.4e",
            index, sample.meta.bc_template_id, sample.meta.iterations,
            sample.meta.converged, sample.meta.compliance,
        )
        sample.meta = sample.meta.model_copy(update={"index": produced})
        group = [sample] + (mirror_augment(sample) if info.augment else [])
        for record in group:
            record.meta = record.meta.model_copy(update={"index": produced})
            produced += 1
            yield record
