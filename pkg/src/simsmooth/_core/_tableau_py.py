"""Numpy implementation of the tableau kernels."""

import numpy as np


def pivot(T: np.ndarray, row: int, col: int) -> None:
    """Gauss-Jordan pivot on T[row, col], in place."""
    T[row] /= T[row, col]
    column = T[:, col].copy()
    column[row] = 0.0
    hit = np.flatnonzero(column)
    if hit.size:
        T[hit] -= np.outer(column[hit], T[row])
    T[hit, col] = 0.0
    T[row, col] = 1.0


def entering_bland(costs: np.ndarray, ncols: int, tol: float) -> int:
    """Lowest-index column with negative reduced cost, or -1."""
    neg = np.flatnonzero(costs[:ncols] < -tol)
    return int(neg[0]) if neg.size else -1


def leaving_bland(T: np.ndarray, col: int, nrows: int, basis: np.ndarray, tol: float) -> int:
    """Minimum-ratio row for ``col``; ties go to the smallest basic variable. -1 if unbounded."""
    column = T[:nrows, col]
    rows = np.flatnonzero(column > tol)
    if rows.size == 0:
        return -1
    ratios = T[rows, -1] / column[rows]
    best = ratios.min()
    tied = rows[ratios <= best + tol * max(1.0, best)]
    return int(tied[np.argmin(basis[tied])])
