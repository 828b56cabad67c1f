"""Small dense two-phase simplex solver.

Solves    min c.z   subject to   A z = b,  z >= 0
on a full tableau.  Problem sizes in this package are tiny by LP standards
(a few thousand constraints at the very most, usually a few hundred), so a
dense tableau with Dantzig pivoting is both fast enough and easy to audit.
Bland's rule takes over after a stall to rule out cycling.

Callers may pass an initial basic feasible basis (a list of column indices,
one per row, whose submatrix is triangular-solvable in the given order and
whose basic solution is nonnegative); phase 1 is skipped in that case.
"""

import numpy as np

from .errors import SolverFailure

_PIVOT_TOL = 1e-10
_COST_TOL = 1e-9


def _run_phase(tab, basis, *, maxiter, bland_after):
    """Run pivots on tableau tab (m constraint rows + 1 cost row) in place.

    The cost row stores reduced costs; its last entry is minus the current
    objective value.  Returns the objective value at optimality.
    """
    m = len(basis)
    ncols = tab.shape[1] - 1
    for it in range(maxiter):
        costs = tab[-1, :ncols]
        if it < bland_after:
            j = int(np.argmin(costs))
            if costs[j] >= -_COST_TOL:
                return -tab[-1, -1]
        else:
            neg = np.flatnonzero(costs < -_COST_TOL)
            if neg.size == 0:
                return -tab[-1, -1]
            j = int(neg[0])
        col = tab[:m, j]
        pos = np.flatnonzero(col > _PIVOT_TOL)
        if pos.size == 0:
            raise SolverFailure("simplex: unbounded phase objective")
        ratios = tab[pos, -1] / col[pos]
        rmin = ratios.min()
        ties = pos[ratios <= rmin + _PIVOT_TOL]
        # among ratio ties take the row whose basic variable has the
        # smallest index (Bland-compatible, deterministic)
        r = int(ties[np.argmin([basis[t] for t in ties])])
        piv = tab[r, j]
        tab[r, :] /= piv
        for i in range(m + 1):
            if i != r and tab[i, j] != 0.0:
                tab[i, :] -= tab[i, j] * tab[r, :]
        basis[r] = j
    raise SolverFailure(f"simplex: no convergence within {maxiter} pivots")


def _set_cost_row(tab, basis, c):
    m = len(basis)
    tab[-1, :] = 0.0
    tab[-1, : c.shape[0]] = c
    for i in range(m):
        cb = c[basis[i]] if basis[i] < c.shape[0] else 0.0
        if cb != 0.0:
            tab[-1, :] -= cb * tab[i, :]


def solve_standard_lp(c, A, b, *, basis=None, maxiter=None):
    """Return (z, value) for min c.z s.t. A z = b, z >= 0.

    Raises SolverFailure on infeasibility, unboundedness, or pivot budget
    exhaustion.  All formulations built in this package are feasible and
    bounded, so SolverFailure here signals a genuine numerical breakdown.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).copy()
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if maxiter is None:
        maxiter = 200 * (m + n)
    bland_after = maxiter // 2

    if basis is not None:
        basis = list(basis)
        tab = np.zeros((m + 1, n + 1))
        tab[:m, :n] = A
        tab[:m, -1] = b
        # Gauss-Jordan on the basic columns, in row order
        for i in range(m):
            piv = tab[i, basis[i]]
            if abs(piv) <= _PIVOT_TOL:
                raise SolverFailure("simplex: singular initial basis")
            tab[i, :] /= piv
            col = basis[i]
            for r in range(m):
                if r != i and tab[r, col] != 0.0:
                    tab[r, :] -= tab[r, col] * tab[i, :]
        if np.any(tab[:m, -1] < -1e-8):
            raise SolverFailure("simplex: initial basis is infeasible")
        np.maximum(tab[:m, -1], 0.0, out=tab[:m, -1])
        _set_cost_row(tab, basis, c)
        value = _run_phase(tab, basis, maxiter=maxiter, bland_after=bland_after)
        z = np.zeros(n)
        for i, col in enumerate(basis):
            if col < n:
                z[col] = tab[i, -1]
        return z, value

    # phase 1: artificial variables with an identity start
    flip = b < 0.0
    A1 = A.copy()
    A1[flip, :] *= -1.0
    b1 = np.where(flip, -b, b)
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A1
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b1
    basis = list(range(n, n + m))
    art_cost = np.zeros(n + m)
    art_cost[n:] = 1.0
    _set_cost_row(tab, basis, art_cost)
    infeas = _run_phase(tab, basis, maxiter=maxiter, bland_after=bland_after)
    scale = max(1.0, float(np.abs(b1).max()))
    if infeas > 1e-7 * scale:
        raise SolverFailure(f"simplex: phase 1 left infeasibility {infeas:.3e}")

    # drive remaining artificials out of the basis; rows that cannot be
    # pivoted are redundant constraints and are dropped
    keep = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        row = tab[i, :n]
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > _PIVOT_TOL:
            piv = tab[i, j]
            tab[i, :] /= piv
            for r in range(m + 1):
                if r != i and tab[r, j] != 0.0:
                    tab[r, :] -= tab[r, j] * tab[i, :]
            basis[i] = j
            keep.append(i)
    if len(keep) < m:
        rows = keep + [m]
        tab = tab[rows, :]
        basis = [basis[i] for i in keep]
        m = len(basis)

    # phase 2 on original columns only
    tab = np.hstack([tab[:, :n], tab[:, -1:]])
    _set_cost_row(tab, basis, c)
    value = _run_phase(tab, basis, maxiter=maxiter, bland_after=bland_after)
    z = np.zeros(n)
    for i, col in enumerate(basis):
        if col < n:
            z[col] = tab[i, -1]
    return z, value
