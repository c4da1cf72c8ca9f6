"""Minimum-cost assignment for rectangular matrices (rows <= columns).

Shortest-augmenting-path solver plus a refinement pass that makes the
returned assignment the lexicographically smallest among all optimal ones
(row 0 gets the lowest feasible column, then row 1, ...), so tied instances
resolve deterministically.
"""

import numpy as np

_TOL = 1e-9


def _jv(cost: np.ndarray) -> tuple[float, np.ndarray]:
    """Solve min-cost assignment; returns (total cost, row->col array)."""
    n, m = cost.shape
    u = np.zeros(n)
    v = np.zeros(m)
    col4row = np.full(n, -1, dtype=np.int64)
    row4col = np.full(m, -1, dtype=np.int64)

    for cur_row in range(n):
        shortest = np.full(m, np.inf)
        path = np.full(m, -1, dtype=np.int64)
        remaining = np.ones(m, dtype=bool)
        scanned_rows: list[int] = []
        scanned_cols: list[int] = []
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            scanned_rows.append(i)
            idx = np.flatnonzero(remaining)
            reduced = min_val + cost[i, idx] - u[i] - v[idx]
            better = reduced < shortest[idx]
            shortest[idx[better]] = reduced[better]
            path[idx[better]] = i
            j = idx[np.argmin(shortest[idx])]
            min_val = shortest[j]
            if not np.isfinite(min_val):
                raise ValueError("assignment problem is infeasible")
            remaining[j] = False
            scanned_cols.append(j)
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]

        u[cur_row] += min_val
        for r in scanned_rows:
            if r != cur_row:
                u[r] += min_val - shortest[col4row[r]]
        for c in scanned_cols:
            v[c] -= min_val - shortest[c]

        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            col4row[i], j = j, col4row[i]
            if i == cur_row:
                break

    total = float(sum(cost[r, col4row[r]] for r in range(n)))
    return total, col4row


def hungarian(cost) -> list[int]:
    """Optimal row->column assignment, ties broken by lowest column index.

    ``cost`` is an n x m matrix with n <= m and finite entries. Returns a
    list of n distinct column indices, one per row.
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError("cost must be a 2-d matrix")
    n, m = c.shape
    if n > m:
        raise ValueError(f"need rows <= columns, got {n}x{m}")
    if n == 0:
        return []
    if not np.isfinite(c).all():
        raise ValueError("cost matrix must be finite")

    scale = max(1.0, float(np.abs(c).max()))
    tol = _TOL * scale * n
    total, col4row = _jv(c)

    # Fix rows in order to the lowest column consistent with optimality.
    assigned: list[int] = []
    fixed_sum = 0.0
    current = [int(x) for x in col4row]
    for i in range(n):
        used = set(assigned)
        rest_rows = list(range(i + 1, n))
        for cand in range(m):
            if cand in used:
                continue
            if cand == current[i]:
                assigned.append(cand)
                fixed_sum += c[i, cand]
                break
            free_cols = [j for j in range(m) if j not in used and j != cand]
            lower = fixed_sum + c[i, cand]
            if rest_rows:
                lower += sum(c[r, free_cols].min() for r in rest_rows)
            if lower > total + tol:
                continue
            if rest_rows:
                sub_total, sub_assign = _jv(c[np.ix_(rest_rows, free_cols)])
            else:
                sub_total, sub_assign = 0.0, []
            if fixed_sum + c[i, cand] + sub_total <= total + tol:
                assigned.append(cand)
                fixed_sum += c[i, cand]
                current[i] = cand
                for r, sj in zip(rest_rows, sub_assign):
                    current[r] = free_cols[sj]
                break
        else:
            raise AssertionError("no consistent column found")  # pragma: no cover
    return assigned


def assignment_cost(cost, assignment=None) -> float:
    """Total cost of an assignment (summed in row order)."""
    c = np.asarray(cost, dtype=np.float64)
    if assignment is None:
        assignment = hungarian(c)
    return float(sum(c[r, assignment[r]] for r in range(c.shape[0])))
