from __future__ import annotations

import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import ParameterError


class GridDomain(BaseModel):
    """Regular grid of unit-square elements.

    Nodes are numbered column-major, ``n = (nely + 1) * ix + iy`` with ``iy``
    counted from the top node row. Elements are numbered ``e = nely * ex + ey``.
    """

    model_config = ConfigDict(frozen=True)

    nelx: int = Field(ge=1)
    nely: int = Field(ge=1)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nely, self.nelx

    @property
    def n_elements(self) -> int:
        return self.nelx * self.nely

    @property
    def n_nodes(self) -> int:
        return (self.nelx + 1) * (self.nely + 1)

    @property
    def n_dofs(self) -> int:
        return 2 * self.n_nodes

    def node_index(self, ix: int, iy: int) -> int:
        if not (0 <= ix <= self.nelx and 0 <= iy <= self.nely):
            raise ParameterError(f"node ({ix}, {iy}) outside a {self.nelx}x{self.nely} grid")
        return (self.nely + 1) * ix + iy

    def node_coords(self, node: int) -> Tuple[int, int]:
        """Return ``(ix, iy)`` of a node index."""
        if not 0 <= node < self.n_nodes:
            raise ParameterError(f"node {node} out of range (n_nodes={self.n_nodes})")
        return divmod(int(node), self.nely + 1)


class MaterialModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    e0: float = 1.0
    emin: float = 1e-9
    nu: float = 0.3
    penal: float = 3.0

    @model_validator(mode="after")
    def _check(self) -> "MaterialModel":
        if not (0.0 < self.emin < self.e0):
            raise ValueError("need 0 < emin < e0")
        if not (0.0 < self.nu < 0.5):
            raise ValueError("nu must lie in (0, 0.5)")
        if self.penal < 1.0:
            raise ValueError("penal must be >= 1")
        return self

    def modulus(self, rho: np.ndarray) -> np.ndarray:
        """SIMP interpolation ``Emin + rho**p (E0 - Emin)``."""
        return self.emin + np.asarray(rho, dtype=float) ** self.penal * (self.e0 - self.emin)


class Force(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: int = Field(ge=0)
    fx: float
    fy: float


class LoadCase(BaseModel):
    model_config = ConfigDict(frozen=True)

    forces: List[Force]
    fixed_dofs: List[int]
    bc_template_id: str = "custom"

    @field_validator("fixed_dofs")
    @classmethod
    def _non_empty(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("fixed_dofs must not be empty")
        return sorted(set(int(d) for d in v))

    def validate_for(self, grid: GridDomain) -> None:
        for f in self.forces:
            if f.node >= grid.n_nodes:
                raise ParameterError(f"force node {f.node} >= node count {grid.n_nodes}")
            if not (math.isfinite(f.fx) and math.isfinite(f.fy)):
                raise ParameterError(f"non-finite force at node {f.node}")
        bad = [d for d in self.fixed_dofs if d < 0 or d >= grid.n_dofs]
        if bad:
            raise ParameterError(f"fixed dof {bad[0]} outside [0, {grid.n_dofs})")

    def force_vector(self, grid: GridDomain) -> np.ndarray:
        f = np.zeros(grid.n_dofs)
        for force in self.forces:
            f[2 * force.node] += force.fx
            f[2 * force.node + 1] += force.fy
        return f

    def scaled(self, factor: float) -> "LoadCase":
        forces = [Force(node=f.node, fx=f.fx * factor, fy=f.fy * factor) for f in self.forces]
        return self.model_copy(update={"forces": forces})


class SimpConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    volfrac: float = 0.5
    rmin: float = 1.5
    penal: float = 3.0
    move_limit: float = 0.2
    change_tol: float = 0.01
    max_iters: int = 200
    oc_tol: float = 1e-4

    @model_validator(mode="after")
    def _check(self) -> "SimpConfig":
        if not (0.0 < self.volfrac < 1.0):
            raise ValueError("volfrac must lie in (0, 1)")
        if self.rmin <= 0.0:
            raise ValueError("rmin must be > 0")
        if not (0.0 < self.move_limit <= 1.0):
            raise ValueError("move_limit must lie in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.penal < 1.0:
            raise ValueError("penal must be >= 1")
        if self.oc_tol <= 0.0 or self.change_tol <= 0.0:
            raise ValueError("tolerances must be > 0")
        return self


class SamplingConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    force_range: Tuple[float, float] = (-100.0, 100.0)
    n_forces: int = Field(default=1, ge=1)
    volfrac: float = 0.5
    rmin: float = 1.5
    seed: int = 0
    resolution: Tuple[int, int] = (40, 80)  # (nely, nelx)
    templates: List[str] = Field(default_factory=lambda: ["a", "b"])

    @field_validator("force_range")
    @classmethod
    def _ordered(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if not v[0] < v[1]:
            raise ValueError("force_range must be (low, high) with low < high")
        return v

    @property
    def grid(self) -> GridDomain:
        return GridDomain(nely=self.resolution[0], nelx=self.resolution[1])


Side = Literal[
    "left", "right", "top", "bottom", "bottom_left", "bottom_right", "top_left", "top_right"
]


class Support(BaseModel):
    model_config = ConfigDict(frozen=True)

    where: Side
    dofs: Literal["xy", "x", "y"] = "xy"


class Region(BaseModel):
    """Rectangle in fractional domain coordinates, y pointing up."""

    model_config = ConfigDict(frozen=True)

    x_lo: float = 0.5
    x_hi: float = 1.0
    y_lo: float = 0.0
    y_hi: float = 1.0

    @model_validator(mode="after")
    def _non_empty(self) -> "Region":
        if not (self.x_lo <= self.x_hi and self.y_lo <= self.y_hi):
            raise ValueError("force region is empty")
        return self


class BcTemplate(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    description: str = ""
    supports: List[Support]
    force_region: Region = Field(default_factory=Region)

    def fixed_dofs(self, grid: GridDomain) -> List[int]:
        dofs: set[int] = set()
        for support in self.supports:
            for node in _support_nodes(grid, support.where):
                if "x" in support.dofs:
                    dofs.add(2 * node)
                if "y" in support.dofs:
                    dofs.add(2 * node + 1)
        return sorted(dofs)


def _support_nodes(grid: GridDomain, where: str) -> List[int]:
    nx, ny = grid.nelx, grid.nely
    if where == "left":
        return [grid.node_index(0, iy) for iy in range(ny + 1)]
    if where == "right":
        return [grid.node_index(nx, iy) for iy in range(ny + 1)]
    if where == "top":
        return [grid.node_index(ix, 0) for ix in range(nx + 1)]
    if where == "bottom":
        return [grid.node_index(ix, ny) for ix in range(nx + 1)]
    corners = {
        "top_left": (0, 0),
        "top_right": (nx, 0),
        "bottom_left": (0, ny),
        "bottom_right": (nx, ny),
    }
    return [grid.node_index(*corners[where])]


def check_density(values, shape: Optional[Tuple[int, int]] = None, name: str = "density") -> np.ndarray:
    """Validate a density field (nely x nelx, finite, within [0, 1])."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ParameterError(f"{name} must be a non-empty 2D array, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise ParameterError(f"{name} shape {arr.shape} does not match {tuple(shape)}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ParameterError(f"{name} values must lie in [0, 1]")
    return arr
