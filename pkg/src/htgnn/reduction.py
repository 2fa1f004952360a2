"""Persistence pairs via boundary-matrix reduction over Z/2.

Standard left-to-right column reduction in filtration order: a column
that gains a pivot pairs the pivot simplex's birth with its own entry
value; columns that reduce to zero create classes, and the basis-change
matrix accumulated during reduction yields a representative cycle for
every class of dimension >= 1. Zero-length pairs are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .accel import get_kernels
from .filtration import Filtration, PhConfig


@dataclass(frozen=True)
class PersistencePair:
    """One bar: (dim, birth, death) plus provenance and a cycle.

    ``death`` is ``math.inf`` for classes alive at ``r_max``;
    ``representative`` is a frozenset of undirected vertex pairs (empty
    for dimension 0, whose convention lives in the edge extractor).
    """

    dim: int
    birth: float
    death: float
    birth_simplex_index: int
    death_simplex_index: int | None
    representative: frozenset[tuple[int, int]]

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.death)


def _encode(verts: np.ndarray, base: np.int64) -> np.ndarray:
    code = np.zeros(verts.shape[0], np.int64)
    mult = np.int64(1)
    for t in range(verts.shape[1]):
        code += (verts[:, t].astype(np.int64) + 1) * mult
        mult *= base
    return code


def boundary_csc(filtration: Filtration) -> tuple[np.ndarray, np.ndarray]:
    """Column-compressed Z/2 boundary matrix in filtration order."""
    verts = filtration.verts
    dims = filtration.dims
    n = len(filtration)
    base = np.int64(filtration.n_vertices + 1)
    codes = _encode(verts, base)
    order = np.argsort(codes)
    sorted_codes = codes[order]

    counts = np.where(dims > 0, dims.astype(np.int64) + 1, 0)
    bd_ptr = np.zeros(n + 1, np.int64)
    np.cumsum(counts, out=bd_ptr[1:])
    bd_rows = np.empty(int(bd_ptr[-1]), np.int32)

    for d in (1, 2, 3):
        idx = np.flatnonzero(dims == d)
        if idx.size == 0:
            continue
        vblock = verts[idx, : d + 1]
        facet_rows = np.empty((idx.size, d + 1), np.int64)
        for drop in range(d + 1):
            keep = [t for t in range(d + 1) if t != drop]
            fcodes = _encode(vblock[:, keep], base)
            pos = np.searchsorted(sorted_codes, fcodes)
            facet_rows[:, drop] = order[pos]
        facet_rows.sort(axis=1)
        flat_targets = bd_ptr[idx][:, None] + np.arange(d + 1)[None, :]
        bd_rows[flat_targets.ravel()] = facet_rows.astype(np.int32).ravel()
    return bd_ptr, bd_rows


def _vertex_pair(verts_row: np.ndarray) -> tuple[int, int]:
    return int(verts_row[0]), int(verts_row[1])


def _cycle_edges(filtration: Filtration, member_indices: np.ndarray, dim: int) -> frozenset:
    edges: set[tuple[int, int]] = set()
    for idx in member_indices:
        row = filtration.verts[idx]
        if dim == 1:
            edges.add(_vertex_pair(row))
        else:  # dim == 2: the three edges of each triangle
            a, b, c = int(row[0]), int(row[1]), int(row[2])
            edges.update(((a, b), (a, c), (b, c)))
    return frozenset(edges)


def reduce_boundary_matrix(
    filtration: Filtration, include_capped_dim: bool = False
) -> list[PersistencePair]:
    """All persistence pairs of dimension <= max_simplex_dim - 1.

    With ``include_capped_dim=True``, classes of the top simplex
    dimension are reported too (without representatives); they describe
    the dimension-capped complex rather than the underlying space and
    are only meaningful for counting checks.
    """
    n = len(filtration)
    dims = filtration.dims
    values = filtration.values
    top = filtration.max_simplex_dim
    bd_ptr, bd_rows = boundary_csc(filtration)
    # Basis columns are only needed where representatives are: dims 1..top-1.
    track = ((dims >= 1) & (dims <= top - 1)).astype(np.uint8)
    kernels = get_kernels()
    low_of, v_start, v_len, v_pool = kernels.reduce_columns(bd_ptr, bd_rows, track)

    paired_birth = low_of[low_of >= 0]
    death_of = np.full(n, -1, np.int64)
    death_of[paired_birth] = np.flatnonzero(low_of >= 0)

    pairs: list[PersistencePair] = []
    positive = low_of < 0
    for b in np.flatnonzero(positive):
        dim = int(dims[b])
        if dim > top - 1 and not include_capped_dim:
            continue
        birth = float(values[b])
        j = int(death_of[b])
        rep = frozenset()
        if 1 <= dim <= top - 1 and track[b]:
            members = v_pool[v_start[b] : v_start[b] + v_len[b]]
            rep = _cycle_edges(filtration, members, dim)
        if j >= 0:
            death = float(values[j])
            if death == birth:
                continue  # zero-length bar
            pairs.append(PersistencePair(dim, birth, death, int(b), j, rep))
        else:
            pairs.append(PersistencePair(dim, birth, math.inf, int(b), None, rep))
    pairs.sort(key=lambda p: (p.dim, p.birth, p.death, p.birth_simplex_index))
    return pairs


def lifespan(pair: PersistencePair, r_max: float) -> float:
    """death - birth for finite bars; r_max - birth for bars alive at r_max."""
    if pair.is_infinite:
        return r_max - pair.birth
    return pair.death - pair.birth


def filter_persistent(pairs: list[PersistencePair], config: PhConfig) -> list[PersistencePair]:
    """Pairs of reportable dimension whose lifespan exceeds tau."""
    return [
        p
        for p in pairs
        if p.dim <= config.max_homology_dim and lifespan(p, config.r_max) > config.tau
    ]
