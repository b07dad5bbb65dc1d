"""Dataset container.

A dataset is a directory::

    manifest.json          JSON manifest (sorted keys, 2-space indent)
    samples/000000.bin     one payload per sample

Each payload is the concatenation of ``len(channels)`` blocks followed by a
target block when ``has_target`` is true. A block is nely*nelx little-endian
float32 values in row-major (y-major) order. ``crc32`` in the manifest is the
zlib CRC-32 of the whole payload.
"""

from __future__ import annotations

import json
import logging
import os
import shutil
import zlib
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ..config import get_settings
from ..errors import FormatError
from ..schemas import FIELD_CHANNELS, ChannelDescriptor, DatasetManifest, SampleEntry, SampleMeta
from .records import SampleRecord

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
SAMPLES_DIR = "samples"


def new_manifest(
    resolution: Tuple[int, int],
    channel_names: List[str],
    has_target: bool = True,
    generation=None,
) -> DatasetManifest:
    return DatasetManifest(
        version=get_settings().dataset_format_version,
        resolution=tuple(resolution),
        channels=[ChannelDescriptor(name=n) for n in channel_names],
        has_target=has_target,
        generation=generation,
    )


def _payload(sample: SampleRecord, manifest: DatasetManifest) -> bytes:
    n_channels = len(manifest.channels)
    expected = (n_channels, *manifest.resolution)
    if sample.channels.shape != expected:
        raise FormatError(f"channels shape {sample.channels.shape} != {expected}", sample.meta.index)
    parts = [sample.channels.astype("<f4").tobytes(order="C")]
    if manifest.has_target:
        if sample.target is None or sample.target.shape != tuple(manifest.resolution):
            raise FormatError("missing or misshaped target", sample.meta.index)
        parts.append(sample.target.astype("<f4").tobytes(order="C"))
    return b"".join(parts)


def write_manifest(manifest: DatasetManifest, path: Path) -> None:
    text = json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True)
    tmp = path / (MANIFEST_NAME + ".tmp")
    tmp.write_text(text + "\n", encoding="utf-8")
    os.replace(tmp, path / MANIFEST_NAME)


def write_dataset(samples: Iterable[SampleRecord], manifest: DatasetManifest, path: str | Path) -> DatasetManifest:
    """Serialize samples in order; the single writer of a dataset directory.

    ``manifest`` supplies the header (resolution, channels, generation info);
    its sample list is rebuilt from ``samples``. Stale payloads and the
    manifest of an earlier run in the same directory are removed first, so a
    stream that fails partway leaves a directory without a manifest.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    (root / MANIFEST_NAME).unlink(missing_ok=True)
    sample_dir = root / SAMPLES_DIR
    if sample_dir.exists():
        shutil.rmtree(sample_dir)
    sample_dir.mkdir()

    entries: List[SampleEntry] = []
    for i, sample in enumerate(samples):
        if sample.meta.index != i:
            sample = SampleRecord(
                channels=sample.channels, meta=sample.meta.model_copy(update={"index": i}), target=sample.target
            )
        payload = _payload(sample, manifest)
        rel = f"{SAMPLES_DIR}/{i:06d}.bin"
        (root / rel).write_bytes(payload)
        entries.append(SampleEntry(path=rel, crc32=zlib.crc32(payload), meta=sample.meta))

    done = manifest.model_copy(update={"samples": entries, "count": len(entries)})
    write_manifest(done, root)
    logger.info("[dataset.write] path=%s count=%d", root, len(entries))
    return done


def read_manifest(path: str | Path) -> DatasetManifest:
    root = Path(path)
    mpath = root / MANIFEST_NAME
    if not mpath.exists():
        raise FormatError(f"no {MANIFEST_NAME} in {root}")
    try:
        manifest = DatasetManifest.model_validate_json(mpath.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise FormatError(f"invalid manifest {mpath}: {exc}") from exc
    version = get_settings().dataset_format_version
    if manifest.version != version:
        raise FormatError(f"format version {manifest.version} != supported {version}")
    if manifest.count != len(manifest.samples):
        raise FormatError(f"manifest count {manifest.count} != {len(manifest.samples)} listed samples")
    return manifest


def read_sample(path: str | Path, manifest: DatasetManifest, index: int) -> SampleRecord:
    if not 0 <= index < manifest.count:
        raise FormatError(f"index out of range (count={manifest.count})", index)
    entry = manifest.samples[index]
    file = Path(path) / entry.path
    if not file.exists():
        raise FormatError(f"missing payload {entry.path}", index)
    payload = file.read_bytes()
    nely, nelx = manifest.resolution
    n_blocks = len(manifest.channels) + (1 if manifest.has_target else 0)
    expected = n_blocks * nely * nelx * 4
    if len(payload) != expected:
        raise FormatError(f"truncated payload: {len(payload)} bytes, expected {expected}", index)
    if zlib.crc32(payload) != entry.crc32:
        raise FormatError("checksum mismatch", index)
    data = np.frombuffer(payload, dtype="<f4").reshape(n_blocks, nely, nelx)
    channels = data[: len(manifest.channels)].copy()
    target = data[-1].copy() if manifest.has_target else None
    return SampleRecord(channels=channels, meta=entry.meta, target=target)


def iter_dataset(path: str | Path, manifest: Optional[DatasetManifest] = None) -> Iterator[SampleRecord]:
    manifest = manifest or read_manifest(path)
    for i in range(manifest.count):
        yield read_sample(path, manifest, i)


def read_dataset(path: str | Path) -> Tuple[List[SampleRecord], DatasetManifest]:
    manifest = read_manifest(path)
    return list(iter_dataset(path, manifest)), manifest


def write_fields(fields: Iterable[np.ndarray], path: str | Path, metas: Optional[Iterable[SampleMeta]] = None) -> DatasetManifest:
    """Store density fields (predictions, solved designs) as a one-channel container."""
    fields = [np.asarray(f) for f in fields]
    metas = list(metas) if metas is not None else [SampleMeta(index=i) for i in range(len(fields))]
    resolution = fields[0].shape if fields else (0, 0)
    manifest = new_manifest(resolution, FIELD_CHANNELS, has_target=False)
    samples = (SampleRecord(channels=f[None, ...], meta=m) for f, m in zip(fields, metas))
    return write_dataset(samples, manifest, path)


def read_field(path: str | Path, index: int = 0) -> np.ndarray:
    """Density field of one sample: the target if present, else channel 0."""
    manifest = read_manifest(path)
    sample = read_sample(path, manifest, index)
    field = sample.target if sample.target is not None else sample.channels[0]
    return np.asarray(field, dtype=float)
