from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ..errors import ParameterError
from .diagram import PersistenceDiagram


def _cost_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Square cost matrix of the diagonal-augmented matching problem.

    Rows are the points of ``a`` followed by diagonal copies of ``b``;
    columns are the points of ``b`` followed by diagonal copies of ``a``.
    A point may go to its own diagonal projection at half its persistence;
    two diagonal copies match for free.
    """
    n, m = len(a), len(b)
    cost = np.full((n + m, m + n), math.inf)
    if n and m:
        cost[:n, :m] = np.maximum(
            np.abs(a[:, None, 0] - b[None, :, 0]),
            np.abs(a[:, None, 1] - b[None, :, 1]),
        )
    if n:
        cost[np.arange(n), m + np.arange(n)] = (a[:, 0] - a[:, 1]) / 2.0
    if m:
        cost[n + np.arange(m), np.arange(m)] = (b[:, 0] - b[:, 1]) / 2.0
    cost[n:, m:] = 0.0
    return cost


def _has_perfect_matching(cost: np.ndarray, delta: float) -> bool:
    graph = csr_matrix((cost <= delta).astype(np.int8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def finite_bottleneck(a: np.ndarray, b: np.ndarray) -> float:
    """Exact bottleneck distance between two sets of finite (birth, death) pairs."""
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    if len(a) + len(b) == 0:
        return 0.0
    cost = _cost_matrix(a, b)
    candidates = np.unique(cost[np.isfinite(cost)])
    lo, hi = 0, len(candidates) - 1
    # the largest candidate always admits a matching (everything to the diagonal)
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(cost, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def essential_distance(a: np.ndarray, b: np.ndarray, essential_penalty: Optional[float] = None) -> float:
    """Distance between essential classes, matched in sorted birth order.

    Unequal counts give ``inf``, or ``essential_penalty`` when one is given.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if len(a) != len(b):
        return math.inf if essential_penalty is None else float(essential_penalty)
    if len(a) == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def bottleneck_distance(
    d1: PersistenceDiagram,
    d2: PersistenceDiagram,
    dim: int,
    essential_penalty: Optional[float] = None,
) -> float:
    if dim not in (0, 1):
        raise ParameterError(f"homology dimension must be 0 or 1, got {dim}")
    finite = finite_bottleneck(d1.pairs(dim), d2.pairs(dim))
    essential = essential_distance(d1.essential(dim), d2.essential(dim), essential_penalty)
    return max(finite, essential)
