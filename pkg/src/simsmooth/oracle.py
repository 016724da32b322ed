"""Exact optimal simultaneous trace-distance smoother for small classical states.

The candidate q is written as q = s + a with 0 <= s <= p the kept mass and
a >= 0 the added mass. With R = sum(p - s) and A = sum(a),

    D(p, q) <= (R + A) / 2 + |R - A| / 2 = R + max(0, A - R),

with equality for the natural split s = min(p, q), a = (q - p)^+. Minimizing
``sum(p) - sum(s) + v`` subject to ``v >= A - R`` and the marginal caps
therefore gives exactly min D(p, q), and every right-hand side is
nonnegative, so the slack basis is feasible from the start.

``formulation="absolute"`` builds the textbook linearization instead
(t_i >= |p_i - q_i| and a split trace term); it needs a phase-one solve and
is only practical for a few hundred cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import entropy as ent
from .lp import LinearProgram, lp_solve
from .operators import ClassicalState, PartySet, trace_distance
from .smoother import SubsetFamily

MAX_CELLS = 5500


class OversizeError(ValueError):
    """The instance is too large for the dense simplex."""


@dataclass
class SmootherLP:
    """A smoothing LP together with the bookkeeping to read q back out."""

    lp: LinearProgram
    p: ClassicalState
    caps: dict[PartySet, float]
    formulation: str
    support: np.ndarray
    constant: float

    def candidate(self, x: np.ndarray) -> np.ndarray:
        cells = self.p.probs.size
        q = np.zeros(cells)
        if self.formulation == "absolute":
            q = x[:cells].copy()
        else:
            q[self.support] += x[: self.support.size]
            if self.formulation == "split":
                q += x[self.support.size : self.support.size + cells]
        return np.clip(q, 0.0, None).reshape(self.p.dims)


def marginal_caps(p: ClassicalState, family: SubsetFamily) -> dict[PartySet, float]:
    """Cap 2^{-H} for each subset, from the trace-distance smooth min-entropy."""
    caps = {}
    for s in family.subsets:
        sol = ent.trace_cap_level(p.marginal(s).ravel(), family.epsilon)
        caps[s] = 0.0 if sol.infinite else sol.cap
    return caps


def _cap_groups(p: ClassicalState, subset: PartySet) -> np.ndarray:
    """Flat marginal index (on ``subset``) of every cell."""
    idx = np.unravel_index(np.arange(p.probs.size), p.dims)
    sdims = [p.dims[i] for i in subset]
    return np.ravel_multi_index([idx[i] for i in subset], sdims)


def build_smoother_lp(
    p: ClassicalState, family: SubsetFamily, formulation: str = "split"
) -> SmootherLP:
    if formulation not in ("split", "removal", "absolute"):
        raise ValueError(f"unknown formulation {formulation!r}")
    if family.metric != "trace":
        raise ValueError("the LP oracle covers the trace-distance metric only")
    family.fits(p.num_parties)
    cells = p.probs.size
    if cells > MAX_CELLS:
        raise OversizeError(f"{cells} cells exceed the dense LP limit of {MAX_CELLS}")
    flat = p.probs.ravel()
    support = np.flatnonzero(flat > 0)
    caps = marginal_caps(p, family)
    if formulation == "absolute":
        return _absolute_lp(p, family, caps, support)

    ns = support.size
    na = cells if formulation == "split" else 0
    nvar = ns + na + 1
    rows, rhs = [], []

    def add(cols, values, bound):
        r = np.zeros(nvar)
        r[cols] = values
        rows.append(r)
        rhs.append(bound)

    for k, cell in enumerate(support):
        add([k], [1.0], flat[cell])
    for s in family.subsets:
        groups = _cap_groups(p, s)
        for g in range(math.prod(p.dims[i] for i in s)):
            s_cols = np.flatnonzero(groups[support] == g)
            a_cols = ns + np.flatnonzero(groups == g) if na else np.empty(0, dtype=int)
            if s_cols.size + a_cols.size == 0:
                continue
            add(np.concatenate([s_cols, a_cols]), 1.0, caps[s])
    add(list(range(ns + na)) + [nvar - 1], [1.0] * (ns + na) + [-1.0], flat.sum())

    c = np.zeros(nvar)
    c[:ns] = -1.0
    c[-1] = 1.0
    lp = LinearProgram(c, np.array(rows), np.array(rhs))
    return SmootherLP(lp, p, caps, formulation, support, float(flat.sum()))


def _absolute_lp(p, family, caps, support) -> SmootherLP:
    cells = p.probs.size
    flat = p.probs.ravel()
    # variables: q (cells), t (cells), w+ , w-
    nvar = 2 * cells + 2
    rows, rhs = [], []
    for i in range(cells):
        r = np.zeros(nvar)
        r[i], r[cells + i] = 1.0, -1.0
        rows.append(r)
        rhs.append(flat[i])
        r = np.zeros(nvar)
        r[i], r[cells + i] = -1.0, -1.0
        rows.append(r)
        rhs.append(-flat[i])
    for s in family.subsets:
        groups = _cap_groups(p, s)
        for g in range(math.prod(p.dims[i] for i in s)):
            r = np.zeros(nvar)
            r[np.flatnonzero(groups == g)] = 1.0
            rows.append(r)
            rhs.append(caps[s])
    # sum(p - q) = w+ - w-, as two inequalities
    r = np.zeros(nvar)
    r[:cells], r[-2], r[-1] = -1.0, -1.0, 1.0
    rows.append(r)
    rhs.append(-flat.sum())
    rows.append(-r)
    rhs.append(flat.sum())
    c = np.zeros(nvar)
    c[cells : 2 * cells] = 0.5
    c[-2:] = 0.5
    lp = LinearProgram(c, np.array(rows), np.array(rhs))
    return SmootherLP(lp, p, caps, "absolute", support, 0.0)


def solve_smoother_lp(model: SmootherLP) -> tuple[ClassicalState, float]:
    res = lp_solve(model.lp)
    q = ClassicalState(model.p.dims, model.candidate(res.x))
    return q, res.objective + model.constant


def optimal_classical_smoother(
    p: ClassicalState, family: SubsetFamily, formulation: str = "split"
) -> tuple[ClassicalState, float]:
    """Closest q (in trace distance) meeting every smoothed marginal cap of ``p``.

    Returns q and the optimal distance D*. ``formulation="removal"`` restricts
    the search to q <= p.
    """
    return solve_smoother_lp(build_smoother_lp(p, family, formulation))


def check_caps(q: ClassicalState, caps: dict[PartySet, float]) -> float:
    """Largest violation of the marginal caps by q (<= 0 when all hold)."""
    return max(float(q.marginal(s).max()) - cap for s, cap in caps.items())


def oracle_distance(p: ClassicalState, family: SubsetFamily) -> float:
    q, _ = optimal_classical_smoother(p, family)
    return trace_distance(p, q)
