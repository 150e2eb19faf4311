"""Dense two-phase simplex for small equality-form linear programs.

Solves  min c·x  s.t.  A x = b,  x >= 0  on problems of desk scale
(a few hundred variables, ~10 constraints), which is all the edge and
envelope oracles need. Dantzig pricing with a Bland fallback guards
against cycling on the degenerate bases these polytopes produce.
"""

from __future__ import annotations

import numpy as np


class LPStatus:
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colvals = T[:, col].copy()
    colvals[row] = 0.0
    T -= np.outer(colvals, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run(T: np.ndarray, basis: np.ndarray, ncols: int, tol: float) -> str:
    m = len(basis)
    bland_after = 50 * (ncols + m)
    it = 0
    while True:
        reduced = T[-1, :ncols]
        if it < bland_after:
            col = int(np.argmin(reduced))
            if reduced[col] >= -tol:
                return LPStatus.OPTIMAL
        else:
            negs = np.nonzero(reduced < -tol)[0]
            if len(negs) == 0:
                return LPStatus.OPTIMAL
            col = int(negs[0])
        ratios = np.full(m, np.inf)
        positive = T[:m, col] > tol
        ratios[positive] = T[:m, -1][positive] / T[:m, col][positive]
        row = int(np.argmin(ratios))
        if not np.isfinite(ratios[row]):
            return LPStatus.UNBOUNDED
        _pivot(T, basis, row, col)
        it += 1


def solve_lp(c, A, b, tol: float = 1e-9):
    """Minimize c·x subject to A x = b, x >= 0.

    Returns (status, x, objective); x and objective are None unless optimal.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    A = A.copy()
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # Phase 1: artificial variables form the starting basis.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(n, n + m)
    status = _run(T, basis, n + m, tol)
    if status != LPStatus.OPTIMAL or -T[-1, -1] > tol * max(1.0, abs(b).max()):
        return LPStatus.INFEASIBLE, None, None

    # Drive leftover artificials out of the basis where possible.
    for row in range(m):
        if basis[row] >= n:
            cand = np.nonzero(np.abs(T[row, :n]) > tol)[0]
            if len(cand):
                _pivot(T, basis, row, int(cand[0]))

    # Phase 2 on the original objective.
    keep = [row for row in range(m) if basis[row] < n]
    T2 = np.zeros((len(keep) + 1, n + 1))
    T2[: len(keep), :n] = T[keep, :n]
    T2[: len(keep), -1] = T[keep, -1]
    basis2 = basis[keep]
    T2[-1, :n] = c
    for row, col in enumerate(basis2):
        T2[-1] -= T2[-1, col] * T2[row]
    status = _run(T2, basis2, n, tol)
    if status != LPStatus.OPTIMAL:
        return status, None, None
    x = np.zeros(n)
    x[basis2] = T2[: len(basis2), -1]
    return LPStatus.OPTIMAL, x, float(np.dot(c, x))
