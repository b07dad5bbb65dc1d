from __future__ import annotations

from typing import List, Literal

import numpy as np

from ..models import Force, GridDomain
from .records import SampleRecord

Axis = Literal["x", "y", "xy"]


def _mirror_node(grid: GridDomain, node: int, axis: str) -> int:
    ix, iy = grid.node_coords(node)
    if "x" in axis:
        ix = grid.nelx - ix
    if "y" in axis:
        iy = grid.nely - iy
    return grid.node_index(ix, iy)


def _compose_tag(current: str | None, axis: str) -> str | None:
    flips = set(current or "") ^ set(axis)
    return "".join(a for a in "xy" if a in flips) or None


def mirror_sample(sample: SampleRecord, axis: Axis) -> SampleRecord:
    """Reflect a sample about the vertical (``x``), horizontal (``y``) or both axes.

    An x-mirror maps x -> L - x, so Fx changes sign; a y-mirror negates Fy.
    Scalar channels are reflected without sign change.
    """
    grid = sample.grid
    channels = sample.channels
    target = sample.target
    if "x" in axis:
        channels = channels[..., ::-1]
        target = target[..., ::-1] if target is not None else None
    if "y" in axis:
        channels = channels[..., ::-1, :]
        target = target[..., ::-1, :] if target is not None else None
    channels = np.array(channels, dtype="<f4")
    if "x" in axis and channels.shape[0] >= 2:
        channels[1] = -channels[1]
    if "y" in axis and channels.shape[0] >= 3:
        channels[2] = -channels[2]

    meta = sample.meta
    forces = [
        Force(
            node=_mirror_node(grid, f.node, axis),
            fx=-f.fx if "x" in axis else f.fx,
            fy=-f.fy if "y" in axis else f.fy,
        )
        for f in meta.forces
    ]
    fixed = sorted(2 * _mirror_node(grid, d // 2, axis) + d % 2 for d in meta.fixed_dofs)
    tag = _compose_tag(meta.augmented, axis)
    source = (meta.source_index if meta.source_index is not None else meta.index) if tag else None
    new_meta = meta.model_copy(
        update={"forces": forces, "fixed_dofs": fixed, "augmented": tag, "source_index": source}
    )
    return SampleRecord(channels=channels, meta=new_meta, target=target)


def mirror_augment(sample: SampleRecord) -> List[SampleRecord]:
    """x-, y- and xy-mirrors of a complete sample."""
    return [mirror_sample(sample, axis) for axis in ("x", "y", "xy")]
