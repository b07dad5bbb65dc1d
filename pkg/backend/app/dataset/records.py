from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..models import GridDomain
from ..schemas import SampleMeta


@dataclass
class SampleRecord:
    """One stored sample: channel tensor, optional SIMP target, metadata.

    Tensors are kept as little-endian float32, the on-disk payload type, so
    that a write-read round trip is bit-exact.
    """

    channels: np.ndarray  # (C, nely, nelx)
    meta: SampleMeta
    target: Optional[np.ndarray] = None  # (nely, nelx)

    def __post_init__(self) -> None:
        self.channels = np.ascontiguousarray(self.channels, dtype="<f4")
        if self.target is not None:
            self.target = np.ascontiguousarray(self.target, dtype="<f4")

    @property
    def grid(self) -> GridDomain:
        nely, nelx = self.channels.shape[-2:]
        return GridDomain(nelx=nelx, nely=nely)

    def same_as(self, other: "SampleRecord") -> bool:
        """Bit-exact equality of tensors and metadata."""
        if self.meta != other.meta or self.channels.shape != other.channels.shape:
            return False
        if self.channels.tobytes() != other.channels.tobytes():
            return False
        if (self.target is None) != (other.target is None):
            return False
        return self.target is None or self.target.tobytes() == other.target.tobytes()
