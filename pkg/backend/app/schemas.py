from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

from .models import Force, LoadCase, MaterialModel, SamplingConfig, SimpConfig

DATASET_CHANNELS = [
    "initial_density",
    "force_x",
    "force_y",
    "von_mises",
    "strain_energy_density",
]
FIELD_CHANNELS = ["density"]


class ChannelDescriptor(BaseModel):
    name: str
    dtype: str = "<f4"
    order: str = "row-major (y-major)"


class SampleMeta(BaseModel):
    index: int
    seed: Optional[int] = None
    bc_template_id: str = "custom"
    forces: List[Force] = Field(default_factory=list)
    fixed_dofs: List[int] = Field(default_factory=list)
    n_forces: int = 0
    converged: Optional[bool] = None
    iterations: Optional[int] = None
    compliance: Optional[float] = None
    # None for an original sample, else "x", "y" or "xy"
    augmented: Optional[Literal["x", "y", "xy"]] = None
    source_index: Optional[int] = None

    def load_case(self) -> LoadCase:
        return LoadCase(forces=self.forces, fixed_dofs=self.fixed_dofs, bc_template_id=self.bc_template_id)


class SampleEntry(BaseModel):
    path: str
    crc32: int
    meta: SampleMeta


class GenerationInfo(BaseModel):
    """Everything needed to regenerate or re-solve a dataset."""

    sampling: SamplingConfig
    simp: SimpConfig
    material: MaterialModel
    augment: bool = False


class DatasetManifest(BaseModel):
    version: int = 1
    count: int = 0
    resolution: Tuple[int, int]  # (nely, nelx)
    channels: List[ChannelDescriptor]
    has_target: bool = True
    generation: Optional[GenerationInfo] = None
    samples: List[SampleEntry] = Field(default_factory=list)

    @property
    def channel_names(self) -> List[str]:
        return [c.name for c in self.channels]


class MetricsRow(BaseModel):
    index: int
    bc_template_id: str = "custom"
    n_forces: int = 0
    mse: float
    binary_accuracy: float
    compliance_error: Optional[float] = None
    unstable: bool = False
    bce: float
    bottleneck_dim0: float
    bottleneck_dim1: float
    l_topology: float
    total_loss: float
    betti0_error: int
    betti1_error: int


class TableRow(BaseModel):
    """Columns of the per-resolution accuracy table."""

    resolution: str
    n_cases: int
    mse: float
    binary_accuracy: float
    compliance_error: float
    compliance_error_std: float


class ScenarioSummary(TableRow):
    bc_group: str
    n_forces: int


class MetricsSummary(TableRow):
    n_unstable: int = 0
    bce: float
    l_topology: float
    total_loss: float
    bottleneck_dim0: float
    bottleneck_dim1: float
    betti0_error: float
    betti1_error: float
    lambda_topo: float
    scenarios: List[ScenarioSummary] = Field(default_factory=list)


class RunRecord(BaseModel):
    """Content of ``run.json``."""

    app: str
    command: str
    exit_code: int
    config: Dict[str, Any]
    outputs: Dict[str, str] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
