"""Interbank lending network inference from aggregate totals.

Recovers an N x N loan matrix Z whose row sums match each bank's
reported interbank assets and whose column sums match its liabilities,
while driving the number of lending relationships toward the
minimum-density ideal. Exact minimisation of the relationship count is
combinatorial, so the solver is a deterministic greedy pairing whose
support provably stays below 2N-1 entries; a brute-force enumerator over
tiny instances serves as the optimality oracle in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


@dataclass
class MdmConfig:
    """Solver knobs.

    ``fixed_cost_c`` scales the sparsity objective uniformly and cannot
    change any minimiser; it is kept for documentation only.
    ``residual_epsilon`` is applied relative to the input scale so that
    float dust from repeated subtraction terminates the greedy cleanly.
    """

    fixed_cost_c: float = 1.0
    balance_tolerance: float = 1e-6
    residual_epsilon: float = 1e-12

    def __post_init__(self) -> None:
        if self.fixed_cost_c <= 0 or self.balance_tolerance <= 0 or self.residual_epsilon <= 0:
            raise ValueError("all MdmConfig fields must be positive")


class BalanceError(ValueError):
    """Total assets and liabilities differ beyond tolerance."""


class InfeasibleMarketError(ValueError):
    """No self-loop-free loan matrix can satisfy the totals."""


def check_balance(assets: np.ndarray, liabilities: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Validate near-balance and return liabilities rescaled to the asset total."""
    a = np.asarray(assets, dtype=np.float64)
    l = np.asarray(liabilities, dtype=np.float64)
    if a.shape != l.shape or a.ndim != 1:
        raise ValueError("assets and liabilities must be 1-d vectors of equal length")
    if np.any(a < 0) or np.any(l < 0):
        raise ValueError("assets and liabilities must be nonnegative")
    total_a = float(a.sum())
    total_l = float(l.sum())
    if total_a == 0.0 and total_l == 0.0:
        return l.copy()
    if abs(total_a - total_l) / max(total_a, total_l, 1.0) > tol:
        raise BalanceError(
            f"asset total {total_a!r} and liability total {total_l!r} "
            f"differ beyond tolerance {tol!r}"
        )
    return l * (total_a / total_l)


def _best_pair(a: np.ndarray, l: np.ndarray, eps: float) -> tuple[int, int] | None:
    """Lexicographically smallest pair (i, j), i != j, maximising min(a_i, l_j).

    Returns None when residuals are exhausted or only a same-index pair
    remains (the self-loop trap, handled by rerouting).
    """
    act_a = np.flatnonzero(a > eps)
    act_l = np.flatnonzero(l > eps)
    if act_a.size == 0 or act_l.size == 0:
        return None
    ia = act_a[np.argmax(a[act_a])]
    jl = act_l[np.argmax(l[act_l])]
    if ia != jl:
        best = min(a[ia], l[jl])
    else:
        # Both maxima sit on the same bank: the best pair skips it on one side.
        best = 0.0
        other_l = act_l[act_l != jl]
        other_a = act_a[act_a != ia]
        if other_l.size:
            best = max(best, min(a[ia], l[other_l].max()))
        if other_a.size:
            best = max(best, min(a[other_a].max(), l[jl]))
        if best <= eps:
            return None
    rows = act_a[a[act_a] >= best]
    cols = act_l[l[act_l] >= best]
    for i in rows:
        if cols[0] != i:
            return int(i), int(cols[0])
        if cols.size > 1:
            return int(i), int(cols[1])
    return None


def _reroute_self_loop(z: np.ndarray, a: np.ndarray, l: np.ndarray, i: int, eps: float) -> None:
    """Route bank i's residual supply to its own residual demand.

    Moves flow through existing third-party entries: for a donor entry
    z[k, m] (k, m != i) the update z[k, m] -= d, z[k, i] += d,
    z[i, m] += d adds d to row i and column i and leaves every other
    row/column sum unchanged. Donors are consumed largest-first among
    those adding the fewest new support entries; a feasible instance
    always has enough donor flow.
    """
    n = z.shape[0]
    while a[i] > eps and l[i] > eps:
        need = min(a[i], l[i])
        best = None  # (new_entries, -value, k, m)
        for k in range(n):
            if k == i:
                continue
            row = z[k]
            for m in range(n):
                if m == i or row[m] <= 0.0:
                    continue
                new_entries = int(z[k, i] == 0.0) + int(z[i, m] == 0.0)
                key = (new_entries, -row[m], k, m)
                if best is None or key < best:
                    best = key
        if best is None:
            raise InfeasibleMarketError(
                f"bank {i} cannot route residual {a[i]!r} without a self-loan"
            )
        _, neg_value, k, m = best
        delta = min(need, -neg_value)
        z[k, m] -= delta
        z[k, i] += delta
        z[i, m] += delta
        a[i] -= delta
        l[i] -= delta


def _cancel_support_cycles(z: np.ndarray, eps: float) -> None:
    """Push flow around support cycles until the support graph is a forest.

    A forest on row/column nodes has at most 2N-1 edges, which restores
    the sparsity guarantee after rerouting. No-op for acyclic supports
    (every plain greedy outcome).
    """
    n = z.shape[0]
    while True:
        entries = np.argwhere(z > 0.0)
        parent = list(range(2 * n))  # rows 0..n-1, columns n..2n-1

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        cycle_edge = None
        adj: dict[int, list[int]] = {}
        for k, m in entries:
            u, v = int(k), int(m) + n
            ru, rv = find(u), find(v)
            if ru == rv and cycle_edge is None:
                cycle_edge = (u, v)
                continue
            if ru != rv:
                parent[ru] = rv
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        if cycle_edge is None:
            return
        # Path between the closing edge's endpoints inside the forest.
        u, v = cycle_edge
        prev = {u: u}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                break
            for y in sorted(adj.get(x, [])):
                if y not in prev:
                    prev[y] = x
                    stack.append(y)
        path = [v]
        while path[-1] != u:
            path.append(prev[path[-1]])
        # Alternate +/- around the cycle; the closing edge takes the - sign.
        cycle = list(reversed(path))  # u .. v
        signed: list[tuple[int, int, int]] = [(-1, u, v - n) if u < n else (-1, v - n, u)]
        sign = 1
        for x, y in zip(cycle, cycle[1:]):
            r, c = (x, y - n) if x < n else (y, x - n)
            signed.append((sign, r, c))
            sign = -sign
        theta = min(z[r, c] for s, r, c in signed if s < 0)
        for s, r, c in signed:
            z[r, c] += s * theta
        np.clip(z, 0.0, None, out=z)
        z[np.abs(z) <= eps] = 0.0


def infer_loan_matrix(
    assets: np.ndarray, liabilities: np.ndarray, config: MdmConfig | None = None
) -> np.ndarray:
    """Greedy sparse loan matrix with exact row/column totals.

    Repeatedly picks the pair (i, j), i != j, with the largest
    transferable amount min(a_i, l_j) (ties broken toward the smallest
    (i, j)), books the transfer, and updates residuals. Each step zeroes
    at least one residual, so at most 2N-1 entries are created. A
    terminal same-bank residual is resolved by rerouting through
    existing entries.
    """
    cfg = config if config is not None else MdmConfig()
    a_in = np.asarray(assets, dtype=np.float64)
    l_in = check_balance(a_in, liabilities, cfg.balance_tolerance)
    n = a_in.shape[0]
    scale = max(1.0, float(a_in.max(initial=0.0)), float(l_in.max(initial=0.0)))
    eps = cfg.residual_epsilon * scale
    if n == 1:
        if a_in[0] > eps or l_in[0] > eps:
            raise InfeasibleMarketError("a single bank cannot lend to itself")
        return np.zeros((1, 1))

    z = np.zeros((n, n))
    a = a_in.copy()
    l = l_in.copy()
    while True:
        pair = _best_pair(a, l, eps)
        if pair is None:
            break
        i, j = pair
        amount = min(a[i], l[j])
        z[i, j] += amount
        a[i] -= amount
        l[j] -= amount

    stuck = np.flatnonzero(a > eps)
    if stuck.size:
        _reroute_self_loop(z, a, l, int(stuck[0]), eps)
        _cancel_support_cycles(z, eps)

    _validate_loan_matrix(z, a_in, l_in)
    return z


def _validate_loan_matrix(z: np.ndarray, assets: np.ndarray, liabilities: np.ndarray) -> None:
    n = z.shape[0]
    if np.any(np.diag(z) != 0.0):
        raise AssertionError("loan matrix has a self-loan entry")
    row = z.sum(axis=1)
    col = z.sum(axis=0)
    row_tol = 1e-9 * np.maximum(1.0, assets)
    col_tol = 1e-9 * np.maximum(1.0, liabilities)
    if np.any(np.abs(row - assets) > row_tol) or np.any(np.abs(col - liabilities) > col_tol):
        raise AssertionError("loan matrix violates row/column totals")
    support = int(np.count_nonzero(z))
    if support > 2 * n - 1:
        raise AssertionError(f"support {support} exceeds 2N-1 = {2 * n - 1}")


def _solve_support(
    pattern: tuple[tuple[int, int], ...], assets: np.ndarray, liabilities: np.ndarray, tol: float
) -> np.ndarray | None:
    """Unique flow on a forest support via leaf elimination, or None.

    Supports containing a cycle are rejected: any feasible cyclic
    support contains a strictly smaller feasible forest, so minimal
    witnesses are always forests.
    """
    n = assets.shape[0]
    a = assets.astype(np.float64).copy()
    l = liabilities.astype(np.float64).copy()
    z = np.zeros((n, n))
    edges = set(pattern)
    while edges:
        row_deg: dict[int, int] = {}
        col_deg: dict[int, int] = {}
        for i, j in edges:
            row_deg[i] = row_deg.get(i, 0) + 1
            col_deg[j] = col_deg.get(j, 0) + 1
        leaf = None
        for i, j in sorted(edges):
            if row_deg[i] == 1:
                leaf = (i, j, "row")
                break
            if col_deg[j] == 1:
                leaf = (i, j, "col")
                break
        if leaf is None:
            return None  # cyclic remainder
        i, j, side = leaf
        flow = a[i] if side == "row" else l[j]
        if flow < -tol:
            return None
        flow = max(flow, 0.0)
        z[i, j] = flow
        a[i] -= flow
        l[j] -= flow
        edges.remove((i, j))
    if np.any(np.abs(a) > tol) or np.any(np.abs(l) > tol):
        return None
    return z


def brute_force_min_support(
    assets: np.ndarray, liabilities: np.ndarray, max_n: int = 5
) -> tuple[int, np.ndarray]:
    """Exact minimal support size with one witness, by enumeration.

    Only intended as a test oracle: the search walks off-diagonal support
    patterns in increasing size and returns the first feasible one.
    """
    a = np.asarray(assets, dtype=np.float64)
    l = check_balance(a, liabilities)
    n = a.shape[0]
    if n > max_n:
        raise ValueError(f"brute force limited to N <= {max_n}, got {n}")
    scale = max(1.0, float(a.max(initial=0.0)))
    tol = 1e-9 * scale
    rows = [i for i in range(n) if a[i] > tol]
    cols = [j for j in range(n) if l[j] > tol]
    cells = [(i, j) for i in rows for j in cols if i != j]
    lower = max(len(rows), len(cols))
    for size in range(lower, len(cells) + 1):
        for pattern in itertools.combinations(cells, size):
            z = _solve_support(pattern, a, l, tol)
            if z is not None:
                return size, z
    raise InfeasibleMarketError("no self-loop-free support satisfies the totals")


def loan_matrix_to_edges(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Undirected lending edges {i, j} with informational weight z_ij + z_ji."""
    zm = np.asarray(z, dtype=np.float64)
    sym = zm + zm.T
    iu, ju = np.triu_indices(zm.shape[0], k=1)
    mask = sym[iu, ju] > 0.0
    edges = np.column_stack((iu[mask], ju[mask])).astype(np.int64)
    weights = sym[iu, ju][mask]
    return edges, weights
