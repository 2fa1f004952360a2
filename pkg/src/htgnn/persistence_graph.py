"""From persistence pairs to the bank-similarity edge set.

Dimension >= 1 classes contribute their representative cycle edges.
Dimension 0 has no canonical edges, so the extractor uses the
single-linkage convention: every minimum-spanning-tree edge whose weight
w satisfies tau < w <= r_max is exactly the merge (death) event of a
component that persisted longer than tau.
"""

from __future__ import annotations

import numpy as np

from .distance import validate_distance_matrix
from .filtration import PhConfig
from .reduction import PersistencePair


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True


def mst_edges(d: np.ndarray) -> list[tuple[tuple[int, int], float]]:
    """Kruskal minimum spanning tree with (weight, i, j) tie-breaking."""
    dm = validate_distance_matrix(d)
    n = dm.shape[0]
    if n == 1:
        return []
    iu, ju = np.triu_indices(n, k=1)
    weights = dm[iu, ju]
    order = np.lexsort((ju, iu, weights))
    uf = _UnionFind(n)
    tree: list[tuple[tuple[int, int], float]] = []
    for k in order:
        i, j = int(iu[k]), int(ju[k])
        if uf.union(i, j):
            tree.append(((i, j), float(weights[k])))
            if len(tree) == n - 1:
                break
    return tree


def extract_edges(
    persistent_pairs: list[PersistencePair], d: np.ndarray, config: PhConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Union of persistent-structure edges, deduplicated and canonical.

    Returns edges as an (E, 2) array with i < j in lexicographic order
    plus their distance weights.
    """
    dm = validate_distance_matrix(d)
    edge_set: set[tuple[int, int]] = set()
    for (i, j), w in mst_edges(dm):
        if config.tau < w <= config.r_max:
            edge_set.add((i, j) if i < j else (j, i))
    for pair in persistent_pairs:
        if pair.dim >= 1:
            for i, j in pair.representative:
                edge_set.add((i, j) if i < j else (j, i))
    if not edge_set:
        return np.empty((0, 2), np.int64), np.empty(0)
    edges = np.array(sorted(edge_set), np.int64)
    weights = dm[edges[:, 0], edges[:, 1]]
    return edges, weights
