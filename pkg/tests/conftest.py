from __future__ import annotations

import numpy as np
import pytest

from backend.app.config import get_settings
from backend.app.dataset.templates import BC_TEMPLATES
from backend.app.models import Force, GridDomain, LoadCase, MaterialModel, SimpConfig


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    for key in ("TOPO_TEMPLATES_FILE", "TOPO_LAMBDA_TOPO", "TOPO_JOBS"):
        monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def material():
    return MaterialModel()


def cantilever_case(grid: GridDomain, fx: float = 0.0, fy: float = -1.0) -> LoadCase:
    """Clamped left edge, point load at the middle of the right edge."""
    node = grid.node_index(grid.nelx, grid.nely // 2)
    return LoadCase(
        forces=[Force(node=node, fx=fx, fy=fy)],
        fixed_dofs=BC_TEMPLATES["a"].fixed_dofs(grid),
        bc_template_id="a",
    )


def mbb_case(grid: GridDomain) -> LoadCase:
    return LoadCase(
        forces=[Force(node=grid.node_index(0, 0), fx=0.0, fy=-1.0)],
        fixed_dofs=BC_TEMPLATES["mbb"].fixed_dofs(grid),
        bc_template_id="mbb",
    )


@pytest.fixture
def quick_simp():
    return SimpConfig(volfrac=0.5, rmin=1.5, max_iters=8)
