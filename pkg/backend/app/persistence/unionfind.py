from __future__ import annotations

import numpy as np


class UnionFind:
    """Array union-find whose roots remember the earliest birth key of their set."""

    def __init__(self, size: int):
        self.parent = np.arange(size)
        self.birth = np.zeros(size, dtype=np.int64)

    def make(self, i: int, birth: int) -> None:
        self.parent[i] = i
        self.birth[i] = birth

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return int(root)

    def union_into(self, elder: int, younger: int) -> None:
        """Attach root ``younger`` under root ``elder``."""
        self.parent[younger] = elder
