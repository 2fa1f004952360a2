"""Vietoris-Rips filtrations built by clique expansion.

A simplex on up to four vertices enters the filtration at its largest
pairwise distance; only simplices whose entry value stays within
``r_max`` are enumerated. Simplices are kept in flat arrays (padded
vertex rows, values, dimensions) sorted by (value, dimension, vertex
order), which is the order the boundary-matrix reduction consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .accel import get_kernels
from .distance import validate_distance_matrix


@dataclass
class PhConfig:
    """Scale window, persistence threshold and homology-dimension cap."""

    r0: float = 0.0
    r_max: float = 0.7
    tau: float = 0.05
    max_homology_dim: int = 2

    def __post_init__(self) -> None:
        if not 0.0 <= self.r0 < self.r_max:
            raise ValueError("need 0 <= r0 < r_max")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.max_homology_dim not in (0, 1, 2):
            raise ValueError("max_homology_dim must be 0, 1 or 2")


@dataclass(frozen=True)
class Simplex:
    vertices: tuple[int, ...]
    filtration_value: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


class Filtration:
    """Sorted simplex arrays plus the scale bound they were built with."""

    def __init__(
        self,
        verts: np.ndarray,
        values: np.ndarray,
        dims: np.ndarray,
        r_max: float,
        n_vertices: int,
        max_simplex_dim: int,
    ) -> None:
        self.verts = verts          # (n, 4) int32, padded with -1
        self.values = values        # (n,) float64
        self.dims = dims            # (n,) int8
        self.r_max = r_max
        self.n_vertices = n_vertices
        self.max_simplex_dim = max_simplex_dim

    def __len__(self) -> int:
        return self.values.shape[0]

    def simplex(self, index: int) -> Simplex:
        row = self.verts[index]
        k = int(self.dims[index]) + 1
        return Simplex(tuple(int(v) for v in row[:k]), float(self.values[index]))

    def simplices(self) -> list[Simplex]:
        return [self.simplex(i) for i in range(len(self))]


def build_rips_filtration(d: np.ndarray, config: PhConfig) -> Filtration:
    """All simplices of dimension <= max_homology_dim + 1 within r_max.

    Values below ``r0`` are reported as-is: ``r0`` marks the start of the
    observed scale sweep and, at its default of 0, has no effect on a
    nonnegative distance matrix.
    """
    dm = validate_distance_matrix(d)
    n = dm.shape[0]
    max_simplex_dim = config.max_homology_dim + 1
    kernels = get_kernels()

    adj = (dm <= config.r_max) & ~np.eye(n, dtype=bool)
    adj_u8 = adj.astype(np.uint8)

    vert_rows = [np.column_stack([np.arange(n, dtype=np.int32)])]
    value_rows = [np.zeros(n)]
    dim_rows = [np.zeros(n, np.int8)]

    edges = np.argwhere(np.triu(adj, k=1)).astype(np.int64)
    if edges.shape[0]:
        vert_rows.append(edges.astype(np.int32))
        value_rows.append(dm[edges[:, 0], edges[:, 1]])
        dim_rows.append(np.ones(edges.shape[0], np.int8))

    tris = np.empty((0, 3), np.int32)
    tri_vals = np.empty(0)
    if max_simplex_dim >= 2 and edges.shape[0]:
        tris, tri_vals = kernels.enumerate_triangles(adj_u8, dm, edges)
        if tris.shape[0]:
            vert_rows.append(tris)
            value_rows.append(tri_vals)
            dim_rows.append(np.full(tris.shape[0], 2, np.int8))

    if max_simplex_dim >= 3 and tris.shape[0]:
        tets, tet_vals = kernels.enumerate_tetrahedra(adj_u8, dm, tris, tri_vals)
        if tets.shape[0]:
            vert_rows.append(tets)
            value_rows.append(tet_vals)
            dim_rows.append(np.full(tets.shape[0], 3, np.int8))

    total = sum(v.shape[0] for v in vert_rows)
    verts = np.full((total, 4), -1, np.int32)
    pos = 0
    for block in vert_rows:
        verts[pos : pos + block.shape[0], : block.shape[1]] = block
        pos += block.shape[0]
    values = np.concatenate(value_rows)
    dims = np.concatenate(dim_rows)

    order = np.lexsort((verts[:, 3], verts[:, 2], verts[:, 1], verts[:, 0], dims, values))
    return Filtration(
        verts=verts[order],
        values=values[order],
        dims=dims[order],
        r_max=config.r_max,
        n_vertices=n,
        max_simplex_dim=max_simplex_dim,
    )
