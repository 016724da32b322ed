"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  x >= 0``. Rows with a negative
right-hand side get an artificial variable and a phase-one solve; when
``b_ub >= 0`` the slack basis is feasible and phase one is skipped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._core import entering_bland, leaving_bland, pivot

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-12
COST_TOL = 1e-12
FEASIBILITY_TOL = 1e-9


class LPError(RuntimeError):
    """The program is infeasible, unbounded, or the iteration cap was hit."""


@dataclass
class LinearProgram:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.A_ub = np.asarray(self.A_ub, dtype=float).reshape(-1, self.c.size)
        self.b_ub = np.asarray(self.b_ub, dtype=float).ravel()
        if self.A_ub.shape[0] != self.b_ub.size:
            raise ValueError("A_ub and b_ub disagree on the number of rows")

    @property
    def shape(self) -> tuple[int, int]:
        return self.A_ub.shape


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int


def _run(T: np.ndarray, basis: np.ndarray, ncols: int, max_iter: int) -> int:
    """Pivot until no column below ``ncols`` has negative reduced cost."""
    m = T.shape[0] - 1
    for it in range(max_iter):
        col = entering_bland(T[m], ncols, COST_TOL)
        if col < 0:
            return it
        row = leaving_bland(T, col, m, basis, PIVOT_TOL)
        if row < 0:
            raise LPError("linear program is unbounded")
        pivot(T, row, col)
        basis[row] = col
    raise LPError(f"simplex did not converge in {max_iter} pivots")


def lp_solve(lp: LinearProgram, max_iter: int | None = None) -> LPResult:
    """Optimal vertex of ``lp``; deterministic for a given input."""
    m, n = lp.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    neg = np.flatnonzero(lp.b_ub < 0)
    n_art = neg.size
    width = n + m + n_art + 1
    T = np.zeros((m + 1, width))
    T[:m, :n] = lp.A_ub
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = lp.b_ub
    basis = np.arange(n, n + m, dtype=np.int64)
    iterations = 0
    if n_art:
        T[neg, : n + m] *= -1
        T[neg, -1] *= -1
        art_cols = n + m + np.arange(n_art)
        T[neg, art_cols] = 1.0
        basis[neg] = art_cols
        T[m] = 0.0
        T[m, : n + m] = -T[neg, : n + m].sum(axis=0)
        T[m, -1] = -T[neg, -1].sum()
        iterations += _run(T, basis, n + m + n_art, max_iter)
        if -T[m, -1] > FEASIBILITY_TOL:
            raise LPError(f"linear program is infeasible (phase-one residual {-T[m, -1]:.3g})")
        keep = np.ones(m, dtype=bool)
        for row in np.flatnonzero(basis >= n + m):
            cand = np.flatnonzero(np.abs(T[row, : n + m]) > PIVOT_TOL)
            if cand.size:
                pivot(T, row, int(cand[0]))
                basis[row] = cand[0]
            else:
                keep[row] = False
        T = np.ascontiguousarray(np.vstack([T[:m][keep], T[m:]])[:, np.r_[0 : n + m, width - 1]])
        basis = basis[keep].copy()
        m = T.shape[0] - 1
    T[m] = 0.0
    T[m, :n] = lp.c
    for row, var in enumerate(basis):
        if var < n and lp.c[var] != 0:
            T[m] -= lp.c[var] * T[row]
    iterations += _run(T, basis, T.shape[1] - 1, max_iter)
    x = np.zeros(T.shape[1] - 1)
    x[basis] = T[:m, -1]
    x = x[:n]
    log.debug("simplex finished after %d pivots (%dx%d)", iterations, *lp.shape)
    return LPResult(x=x, objective=float(lp.c @ x), iterations=iterations)
