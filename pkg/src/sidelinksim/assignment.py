"""Exact rectangular min-cost bipartite assignment.

Shortest-augmenting-path solver (the Jonker-Volgenant family) for dense
float matrices with n rows <= m columns.  Forbidden edges are marked with
np.inf and are never chosen.  Among all optimal assignments the solver
returns the one whose column sequence (read row 0, row 1, ...) is
lexicographically smallest, so equal-cost alternatives resolve the same way
on every platform.

The lexicographic pass uses the optimal dual variables as a certificate: an
edge can appear in some optimal assignment only if its reduced cost is zero,
which prunes the candidate columns per row to the tight ones; each candidate
strictly better than the incumbent is then confirmed or rejected by solving
the residual problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FORBIDDEN = np.inf


class AssignmentError(ValueError):
    pass


class InfeasibleRowError(AssignmentError):
    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(message)


@dataclass
class Assignment:
    """cols[i] is the column matched to row i; total is the objective value."""

    cols: np.ndarray
    total: float

    def pairs(self):
        return [(i, int(j)) for i, j in enumerate(self.cols)]


def _check(matrix) -> np.ndarray:
    c = np.asarray(matrix, dtype=float)
    if c.ndim != 2:
        raise AssignmentError(f"cost matrix must be 2-d, got shape {c.shape}")
    n, m = c.shape
    if n == 0:
        raise AssignmentError("cost matrix has no rows")
    if n > m:
        raise AssignmentError(
            f"batch of {n} rows exceeds {m} columns; split the batch before solving")
    if np.isnan(c).any() or np.isneginf(c).any():
        raise AssignmentError("cost entries must be finite or +inf (forbidden)")
    infeasible = np.flatnonzero(~np.isfinite(c).any(axis=1))
    if infeasible.size:
        r = int(infeasible[0])
        raise InfeasibleRowError(r, f"row {r} has no allowed column (all entries forbidden)")
    return c


def _jv(cost: np.ndarray):
    """Solve min-cost assignment; return (col4row, u, v) with optimal duals.

    Maintains nonnegative reduced costs c[i, j] - u[i] - v[j] with v <= 0, so
    the duals certify optimality for the rectangular relaxation.
    """
    n, m = cost.shape
    u = np.zeros(n)
    v = np.zeros(m)
    col4row = np.full(n, -1, dtype=np.int64)
    row4col = np.full(m, -1, dtype=np.int64)
    for start in range(n):
        d = np.full(m, np.inf)
        prev = np.full(m, -1, dtype=np.int64)
        done = np.zeros(m, dtype=bool)
        tree_rows = [start]
        minval = 0.0
        i = start
        while True:
            red = minval + cost[i] - u[i] - v
            upd = ~done & (red < d)
            d[upd] = red[upd]
            prev[upd] = i
            masked = np.where(done, np.inf, d)
            j = int(masked.argmin())
            minval = float(masked[j])
            if not np.isfinite(minval):
                raise InfeasibleRowError(
                    start, f"no feasible assignment completes row {start}")
            done[j] = True
            if row4col[j] < 0:
                sink = j
                break
            i = int(row4col[j])
            tree_rows.append(i)
        u[start] += minval
        for r in tree_rows[1:]:
            u[r] += minval - d[col4row[r]]
        v[done] += d[done] - minval
        j = sink
        while j >= 0:
            i = int(prev[j])
            row4col[j] = i
            col4row[i], j = j, col4row[i]
    return col4row, u, v


def _lex_refine(cost: np.ndarray, cols: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    n, m = cost.shape
    finite = cost[np.isfinite(cost)]
    scale = float(np.abs(finite).max()) if finite.size else 0.0
    # relative to the data: thousands of ulps of headroom for dual-update
    # rounding, yet far below any genuine cost difference at that magnitude
    tol = 1e-12 * scale
    sum_tol = tol * (n + 1)
    cols = cols.copy()
    avail = np.ones(m, dtype=bool)
    for i in range(n):
        cur = int(cols[i])
        slack = cost[i] - u[i] - v
        tight = np.flatnonzero(avail & (slack <= tol))
        if tight.size and int(tight[0]) != cur:
            rest = float(cost[np.arange(i, n), cols[i:]].sum())
            for j in tight:
                j = int(j)
                if j == cur:
                    break
                avail[j] = False
                improved = False
                if i + 1 == n:
                    improved = cost[i, j] <= rest + sum_tol
                    if improved:
                        cols[i] = j
                else:
                    sub_cols = np.flatnonzero(avail)
                    try:
                        sub_assign, _, _ = _jv(cost[i + 1:][:, sub_cols])
                    except InfeasibleRowError:
                        sub_assign = None
                    if sub_assign is not None:
                        sub_total = float(
                            cost[np.arange(i + 1, n), sub_cols[sub_assign]].sum())
                        if cost[i, j] + sub_total <= rest + sum_tol:
                            cols[i] = j
                            cols[i + 1:] = sub_cols[sub_assign]
                            improved = True
                avail[j] = True
                if improved:
                    break
        avail[int(cols[i])] = False
    return cols


def solve_min(cost) -> Assignment:
    """Minimize total cost over injective row-to-column assignments."""
    c = _check(cost)
    n = c.shape[0]
    col4row, u, v = _jv(c)
    cols = _lex_refine(c, col4row, u, v)
    if np.unique(cols).size != n:
        raise AssignmentError("internal error: assignment is not injective")
    total = float(c[np.arange(n), cols].sum())
    return Assignment(cols=cols, total=total)


def solve_max(weight) -> Assignment:
    """Maximize total weight; forbidden edges stay np.inf in the input."""
    w = _check(weight)
    n = w.shape[0]
    top = float(w[np.isfinite(w)].max())
    c = np.where(np.isinf(w), np.inf, top - w)
    a = solve_min(c)
    total = float(w[np.arange(n), a.cols].sum())
    return Assignment(cols=a.cols, total=total)
