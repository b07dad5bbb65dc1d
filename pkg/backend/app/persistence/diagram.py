from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Tuple

import numpy as np

from ..errors import ParameterError
from ..models import check_density
from .unionfind import UnionFind

NEIGHBORS_8 = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
NEIGHBORS_4 = [(-1, 0), (0, -1), (0, 1), (1, 0)]
# death value of an essential class under the superlevel convention
ESSENTIAL_DEATH = -math.inf


def _empty_pairs() -> np.ndarray:
    return np.empty((0, 2))


@dataclass
class PersistenceDiagram:
    """Superlevel persistence of a density field.

    Finite pairs are (birth, death) thresholds with birth > death; a class is
    present for thresholds ``birth >= t > death``. Essential classes never
    die and are kept as a separate list of births.
    """

    dim0: np.ndarray = field(default_factory=_empty_pairs)
    dim1: np.ndarray = field(default_factory=_empty_pairs)
    essential0: np.ndarray = field(default_factory=lambda: np.empty(0))
    essential1: np.ndarray = field(default_factory=lambda: np.empty(0))

    def pairs(self, dim: int) -> np.ndarray:
        if dim == 0:
            return self.dim0
        if dim == 1:
            return self.dim1
        raise ParameterError(f"homology dimension must be 0 or 1, got {dim}")

    def essential(self, dim: int) -> np.ndarray:
        if dim == 0:
            return self.essential0
        if dim == 1:
            return self.essential1
        raise ParameterError(f"homology dimension must be 0 or 1, got {dim}")

    def rows(self) -> Iterator[Tuple[int, float, float, bool]]:
        for dim in (0, 1):
            for birth in self.essential(dim):
                yield dim, float(birth), ESSENTIAL_DEATH, True
            for birth, death in self.pairs(dim):
                yield dim, float(birth), float(death), False


def _sorted_pairs(pairs: list[tuple[float, float]]) -> np.ndarray:
    if not pairs:
        return _empty_pairs()
    arr = np.asarray(pairs, dtype=float)
    return arr[np.lexsort((arr[:, 1], arr[:, 0]))]


def _component_pairs(values: np.ndarray, order: np.ndarray, offsets, outside: bool) -> tuple[list, list]:
    """Elder-rule H0 over pixels inserted in ``order``.

    Returns (pairs, essential births). A pair is (birth value, death value)
    of the younger component at each merge. With ``outside`` the grid is
    surrounded by an always-present oldest component touching every border
    pixel.
    """
    h, w = values.shape
    n = h * w
    flat = values.ravel()
    uf = UnionFind(n + 1)
    added = np.zeros(n, dtype=bool)
    out_root = n
    if outside:
        uf.make(out_root, -1)
    pairs: list[tuple[float, float]] = []
    first_value = np.empty(n + 1)
    first_value[out_root] = math.nan

    for pos, p in enumerate(order):
        p = int(p)
        r, c = divmod(p, w)
        v = flat[p]
        roots = set()
        for dr, dc in offsets:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w:
                q = rr * w + cc
                if added[q]:
                    roots.add(uf.find(q))
            elif outside:
                roots.add(uf.find(out_root))
        uf.make(p, pos)
        first_value[p] = v
        added[p] = True
        if not roots:
            continue
        elder = min(roots, key=lambda x: uf.birth[x])
        for root in roots:
            if root == elder:
                continue
            born = first_value[root]
            if born != v:
                pairs.append((born, v))
            uf.union_into(elder, root)
        uf.union_into(elder, p)

    roots = {uf.find(i) for i in range(n)}
    if outside:
        roots.discard(uf.find(out_root))
    essential = sorted(first_value[r] for r in roots)
    return pairs, essential


def compute_diagram(field) -> PersistenceDiagram:
    """Superlevel persistence, 8-connected material and 4-connected background.

    H0 is computed with union-find over pixels by decreasing value (ties by
    linear index). H1 is read off by duality: every bounded 4-connected
    background component that is born at pixel value b and merges at value v
    is a hole present for thresholds v >= t > b.
    """
    values = check_density(field, name="field")
    flat = values.ravel()
    idx = np.arange(flat.size)
    order = np.lexsort((idx, -flat))

    pairs0, ess0 = _component_pairs(values, order, NEIGHBORS_8, outside=False)
    merges, _ = _component_pairs(values, order[::-1], NEIGHBORS_4, outside=True)
    # background component born at b, merged at v -> hole (birth v, death b)
    pairs1 = [(v, b) for b, v in merges]

    return PersistenceDiagram(
        dim0=_sorted_pairs(pairs0),
        dim1=_sorted_pairs(pairs1),
        essential0=np.asarray(ess0, dtype=float),
        essential1=np.empty(0),
    )


def write_diagram_csv(diagram: PersistenceDiagram, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim", "birth", "death", "essential"])
        for dim, birth, death, essential in diagram.rows():
            writer.writerow([dim, repr(birth), repr(death), int(essential)])
