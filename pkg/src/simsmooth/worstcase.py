"""Adversarial instances for simultaneous smoothing.

``build_worst_case`` is a two-party grid distribution whose dominant
entries for A1, A2 and A1A2 sit on three disjoint lines, so any smoother has
to pay roughly eps per targeted marginal. ``obstruction_factor`` quantifies
why quantum smoothers cannot in general stay below the original state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import entropy as ent
from .operators import ClassicalState, PartySet, party_set

A1: PartySet = (0,)
A2: PartySet = (1,)
A12: PartySet = (0, 1)
ALL_ACTIVE = (A1, A2, A12)
CLAIM_TOL = 1e-7


@dataclass(frozen=True)
class WorstCaseParams:
    n: int
    active: tuple[PartySet, ...] = ALL_ACTIVE

    def __post_init__(self):
        active = tuple(sorted({party_set(s) for s in self.active}, key=lambda s: (len(s), s)))
        if not active or not set(active) <= set(ALL_ACTIVE):
            raise ValueError(f"active subsets must be drawn from {{A1, A2, A1A2}}, got {active}")
        if self.n < 2:
            raise ValueError("n must be at least 2; for n = 1 the center hits the diagonal")
        object.__setattr__(self, "active", active)

    @property
    def side(self) -> int:
        return 2 * self.n**2 + 1

    @property
    def center(self) -> int:
        """0-based index of the grid center (n^2 + 1 in 1-based terms)."""
        return self.n**2

    def weight(self, s: PartySet) -> float:
        return 1 / len(self.active) if s in self.active else 0.0

    def diagonal_cells(self) -> np.ndarray:
        return np.arange(1, 2 * self.n + 1) * self.n - 1


def build_worst_case(params: WorstCaseParams) -> ClassicalState:
    n, d, c = params.n, params.side, params.center
    p = np.zeros((d, d))
    off = np.arange(d) != c
    p[c, off] = params.weight(A1) / (2 * n**2)
    p[off, c] = params.weight(A2) / (2 * n**2)
    diag = params.diagonal_cells()
    p[diag, diag] = params.weight(A12) / (2 * n)
    return ClassicalState((d, d), p)


def support_lines(params: WorstCaseParams) -> dict[PartySet, set[tuple[int, int]]]:
    """Cells of the row, column and sparse-diagonal lines."""
    d, c = params.side, params.center
    diag = params.diagonal_cells()
    return {
        A1: {(c, j) for j in range(d) if j != c},
        A2: {(i, c) for i in range(d) if i != c},
        A12: {(int(k), int(k)) for k in diag},
    }


@dataclass(frozen=True)
class ClaimVerdict:
    """Whether a smoother's distance reaches the |K| eps lower bound."""

    bound: float
    distance: float
    passed: bool

    @property
    def gap(self) -> float:
        return self.bound - self.distance


def verify_claim_one(params: WorstCaseParams, epsilon: float, oracle_distance: float) -> ClaimVerdict:
    k = len(params.active)
    if not 0 <= epsilon < 1 / k:
        raise ValueError(f"the lower bound needs 0 <= epsilon < 1/{k}, got {epsilon}")
    bound = k * epsilon
    return ClaimVerdict(bound, oracle_distance, oracle_distance >= bound - CLAIM_TOL)


def obstruction_factor(d: int, epsilon: float) -> float:
    """Best factor c with c*rho_S smoothed, for a spectrum that is flat except one bump.

    The marginal has one eigenvalue (1 - eps)/d + eps and d - 1 eigenvalues
    (1 - eps)/d; the result is 2^{-(H_smooth - H)} = cap / lambda_max.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    lam = np.full(d, (1 - epsilon) / d)
    lam[0] += epsilon
    cap = ent.trace_cap_level(lam, epsilon)
    return cap.cap / lam[0]
