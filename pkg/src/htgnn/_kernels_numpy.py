"""Pure-numpy fallbacks for the njit kernels (same results, slower)."""

from __future__ import annotations

import numpy as np


def enumerate_triangles(adj, d, edges):
    tris = []
    vals = []
    n = adj.shape[0]
    above = np.arange(n)
    for i, j in edges:
        ks = np.flatnonzero(adj[i] & adj[j] & (above > j))
        if ks.size == 0:
            continue
        tri = np.empty((ks.size, 3), np.int32)
        tri[:, 0] = i
        tri[:, 1] = j
        tri[:, 2] = ks
        tris.append(tri)
        vals.append(np.maximum(d[i, j], np.maximum(d[i, ks], d[j, ks])))
    if not tris:
        return np.empty((0, 3), np.int32), np.empty(0, np.float64)
    return np.concatenate(tris), np.concatenate(vals)


def enumerate_tetrahedra(adj, d, tris, tri_vals):
    tets = []
    vals = []
    n = adj.shape[0]
    above = np.arange(n)
    for t in range(tris.shape[0]):
        i, j, k = tris[t]
        ms = np.flatnonzero(adj[i] & adj[j] & adj[k] & (above > k))
        if ms.size == 0:
            continue
        tet = np.empty((ms.size, 4), np.int32)
        tet[:, 0] = i
        tet[:, 1] = j
        tet[:, 2] = k
        tet[:, 3] = ms
        tets.append(tet)
        vals.append(
            np.maximum(tri_vals[t], np.maximum(d[i, ms], np.maximum(d[j, ms], d[k, ms])))
        )
    if not tets:
        return np.empty((0, 4), np.int32), np.empty(0, np.float64)
    return np.concatenate(tets), np.concatenate(vals)


def reduce_columns(bd_ptr, bd_rows, track):
    """Column reduction over Z/2; mirrors the njit kernel exactly."""
    n = bd_ptr.shape[0] - 1
    low_of = np.full(n, -1, np.int64)
    pivot_owner = np.full(n, -1, np.int64)
    r_cols: list[np.ndarray | None] = [None] * n
    v_cols: list[np.ndarray | None] = [None] * n

    v_start = np.zeros(n, np.int64)
    v_len = np.zeros(n, np.int64)
    v_chunks: list[np.ndarray] = []
    v_used = 0

    for j in range(n):
        cur = bd_rows[bd_ptr[j] : bd_ptr[j + 1]].astype(np.int32, copy=True)
        tracked = bool(track[j])
        vcur = np.array([j], np.int32) if tracked else None
        while cur.size:
            piv = int(cur[-1])
            k = pivot_owner[piv]
            if k < 0:
                break
            cur = np.setxor1d(cur, r_cols[k], assume_unique=True).astype(np.int32)
            if tracked:
                vcur = np.setxor1d(vcur, v_cols[k], assume_unique=True).astype(np.int32)
        if cur.size:
            piv = int(cur[-1])
            pivot_owner[piv] = j
            low_of[j] = piv
            r_cols[j] = cur
            if tracked:
                v_cols[j] = vcur
        if tracked:
            v_start[j] = v_used
            v_len[j] = vcur.size
            v_chunks.append(vcur)
            v_used += vcur.size
    v_pool = np.concatenate(v_chunks) if v_chunks else np.empty(0, np.int32)
    return low_of, v_start, v_len, v_pool
