"""njit implementations of the clique-expansion and reduction hot loops."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def enumerate_triangles(adj, d, edges):
    n = adj.shape[0]
    cap = max(64, edges.shape[0])
    tri = np.empty((cap, 3), np.int32)
    val = np.empty(cap, np.float64)
    cnt = 0
    for e in range(edges.shape[0]):
        i = edges[e, 0]
        j = edges[e, 1]
        dij = d[i, j]
        for k in range(j + 1, n):
            if adj[i, k] and adj[j, k]:
                if cnt == cap:
                    cap *= 2
                    tri2 = np.empty((cap, 3), np.int32)
                    val2 = np.empty(cap, np.float64)
                    tri2[:cnt] = tri[:cnt]
                    val2[:cnt] = val[:cnt]
                    tri, val = tri2, val2
                v = dij
                if d[i, k] > v:
                    v = d[i, k]
                if d[j, k] > v:
                    v = d[j, k]
                tri[cnt, 0] = i
                tri[cnt, 1] = j
                tri[cnt, 2] = k
                val[cnt] = v
                cnt += 1
    return tri[:cnt].copy(), val[:cnt].copy()


@njit(cache=True)
def enumerate_tetrahedra(adj, d, tris, tri_vals):
    n = adj.shape[0]
    cap = max(64, tris.shape[0])
    tet = np.empty((cap, 4), np.int32)
    val = np.empty(cap, np.float64)
    cnt = 0
    for t in range(tris.shape[0]):
        i = tris[t, 0]
        j = tris[t, 1]
        k = tris[t, 2]
        base = tri_vals[t]
        for m in range(k + 1, n):
            if adj[i, m] and adj[j, m] and adj[k, m]:
                if cnt == cap:
                    cap *= 2
                    tet2 = np.empty((cap, 4), np.int32)
                    val2 = np.empty(cap, np.float64)
                    tet2[:cnt] = tet[:cnt]
                    val2[:cnt] = val[:cnt]
                    tet, val = tet2, val2
                v = base
                if d[i, m] > v:
                    v = d[i, m]
                if d[j, m] > v:
                    v = d[j, m]
                if d[k, m] > v:
                    v = d[k, m]
                tet[cnt, 0] = i
                tet[cnt, 1] = j
                tet[cnt, 2] = k
                tet[cnt, 3] = m
                val[cnt] = v
                cnt += 1
    return tet[:cnt].copy(), val[:cnt].copy()


@njit(cache=True)
def _xor_merge(a, alen, pool, start, plen, out):
    # Symmetric difference of two ascending index arrays.
    ia = 0
    ip = 0
    k = 0
    while ia < alen and ip < plen:
        x = a[ia]
        y = pool[start + ip]
        if x < y:
            out[k] = x
            ia += 1
            k += 1
        elif y < x:
            out[k] = y
            ip += 1
            k += 1
        else:
            ia += 1
            ip += 1
    while ia < alen:
        out[k] = a[ia]
        ia += 1
        k += 1
    while ip < plen:
        out[k] = pool[start + ip]
        ip += 1
        k += 1
    return k


@njit(cache=True)
def reduce_columns(bd_ptr, bd_rows, track):
    """Left-to-right column reduction over Z/2 with basis tracking.

    Returns ``low_of`` (pivot row per negative column, -1 otherwise) and
    the basis-change columns (flattened) for every column whose ``track``
    flag is set; a tracked positive column's basis column is the cycle it
    creates.
    """
    n = bd_ptr.shape[0] - 1
    low_of = np.full(n, -1, np.int64)
    pivot_owner = np.full(n, -1, np.int64)

    r_start = np.zeros(n, np.int64)
    r_len = np.zeros(n, np.int64)
    r_pool = np.empty(max(16, bd_rows.shape[0]), np.int32)
    r_used = 0

    v_start = np.zeros(n, np.int64)
    v_len = np.zeros(n, np.int64)
    v_pool = np.empty(64, np.int32)
    v_used = 0

    cur = np.empty(64, np.int32)
    tmp = np.empty(64, np.int32)
    vcur = np.empty(64, np.int32)
    vtmp = np.empty(64, np.int32)

    for j in range(n):
        m = bd_ptr[j + 1] - bd_ptr[j]
        if cur.shape[0] < m:
            cur = np.empty(2 * m, np.int32)
        for t in range(m):
            cur[t] = bd_rows[bd_ptr[j] + t]
        clen = m
        tracked = track[j]
        vlen = 0
        if tracked:
            vcur[0] = j
            vlen = 1
        while clen > 0:
            piv = cur[clen - 1]
            k = pivot_owner[piv]
            if k < 0:
                break
            need = clen + r_len[k]
            if tmp.shape[0] < need:
                tmp = np.empty(2 * need, np.int32)
            clen = _xor_merge(cur, clen, r_pool, r_start[k], r_len[k], tmp)
            cur, tmp = tmp, cur
            if tracked:
                need = vlen + v_len[k]
                if vtmp.shape[0] < need:
                    vtmp = np.empty(2 * need, np.int32)
                vlen = _xor_merge(vcur, vlen, v_pool, v_start[k], v_len[k], vtmp)
                vcur, vtmp = vtmp, vcur
        if clen > 0:
            piv = cur[clen - 1]
            pivot_owner[piv] = j
            low_of[j] = piv
            while r_used + clen > r_pool.shape[0]:
                grown = np.empty(2 * r_pool.shape[0] + clen, np.int32)
                grown[:r_used] = r_pool[:r_used]
                r_pool = grown
            r_start[j] = r_used
            for t in range(clen):
                r_pool[r_used + t] = cur[t]
            r_len[j] = clen
            r_used += clen
        if tracked:
            while v_used + vlen > v_pool.shape[0]:
                grown = np.empty(2 * v_pool.shape[0] + vlen, np.int32)
                grown[:v_used] = v_pool[:v_used]
                v_pool = grown
            v_start[j] = v_used
            for t in range(vlen):
                v_pool[v_used + t] = vcur[t]
            v_len[j] = vlen
            v_used += vlen
    return low_of, v_start, v_len, v_pool[:v_used].copy()
