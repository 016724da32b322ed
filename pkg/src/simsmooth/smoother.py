"""Simultaneous smoothing of several marginals of one multipartite state.

Every channel is built once from the marginal of the *original* state and
then applied in sequence. Three constructions are provided:

* :func:`smooth_classical` for states whose marginals commute (classical
  states always do), with trace-distance cost at most ``|K| eps``;
* :func:`smooth_two_party` for arbitrary bipartite states;
* :func:`smooth_laminar` for families whose members are nested or disjoint.

Both quantum constructions cost at most ``|K| sqrt(2 eps)`` in purified
distance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import entropy as ent
from .operators import (
    ClassicalState,
    DensityOperator,
    PartySet,
    StateError,
    as_operator,
    complement,
    embed_local,
    partial_trace,
    party_set,
    purified_distance,
    trace_distance,
)

COMMUTATOR_TOL = 1e-9
REPORT_TOL = 1e-9
METRICS = ("trace", "purified")

State = DensityOperator | ClassicalState


class FamilyError(ValueError):
    """The subset family does not fit the requested construction."""


class OverlapError(FamilyError):
    """Two members of the family overlap without being nested."""

    def __init__(self, first: PartySet, second: PartySet):
        self.pair = (first, second)
        super().__init__(
            f"subsets {format_subset(first)} and {format_subset(second)} overlap "
            "without nesting; no simultaneous smoother is known for this family"
        )


def format_subset(s: PartySet) -> str:
    return "{" + ",".join(f"A{i + 1}" for i in s) + "}"


def subset_order_key(s: PartySet):
    return (-len(s), s)


@dataclass(frozen=True)
class SubsetFamily:
    """The family K of marginals to smooth, the radius and the metric."""

    subsets: tuple[PartySet, ...]
    epsilon: float
    metric: str = "trace"

    def __post_init__(self):
        subsets = tuple(party_set(s) for s in self.subsets)
        if not subsets:
            raise FamilyError("the family needs at least one subset")
        if any(not s for s in subsets):
            raise FamilyError("subsets must be nonempty")
        if len(set(subsets)) != len(subsets):
            raise FamilyError("duplicate subsets in family")
        if self.metric not in METRICS:
            raise FamilyError(f"metric must be one of {METRICS}")
        if not 0 <= self.epsilon < 1:
            raise FamilyError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        object.__setattr__(self, "subsets", subsets)

    def __len__(self) -> int:
        return len(self.subsets)

    def fits(self, num_parties: int) -> None:
        for s in self.subsets:
            if s[-1] >= num_parties:
                raise FamilyError(f"subset {format_subset(s)} exceeds {num_parties} parties")

    def with_metric(self, metric: str) -> SubsetFamily:
        return SubsetFamily(self.subsets, self.epsilon, metric)

    @property
    def bound_trace(self) -> float:
        return len(self) * self.epsilon

    @property
    def bound_purified(self) -> float:
        return len(self) * math.sqrt(2 * self.epsilon)


def all_subsets(num_parties: int) -> tuple[PartySet, ...]:
    return tuple(
        s for r in range(1, num_parties + 1) for s in itertools.combinations(range(num_parties), r)
    )


@dataclass
class SubsetRecord:
    subset: PartySet
    h_before: float
    target_trace: float
    target_purified: float
    h_after: float

    @property
    def passed(self) -> bool:
        return self.h_after >= self.target_trace - REPORT_TOL


def _num(x: float):
    return "inf" if math.isinf(x) else x


@dataclass
class SmoothingReport:
    records: list[SubsetRecord]
    distance_trace: float
    distance_purified: float
    bound_trace: float
    bound_purified: float
    metric: str
    entropy_pass: bool
    distance_pass: bool
    channels_applied: list[PartySet] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.entropy_pass and self.distance_pass

    def to_dict(self) -> dict:
        return {
            "subsets": [
                {
                    "subset": [i + 1 for i in r.subset],
                    "h_before": _num(r.h_before),
                    "target_trace": _num(r.target_trace),
                    "target_purified": _num(r.target_purified),
                    "h_after": _num(r.h_after),
                }
                for r in self.records
            ],
            "distance_trace": self.distance_trace,
            "distance_purified": self.distance_purified,
            "bound_trace": self.bound_trace,
            "bound_purified": self.bound_purified,
            "metric": self.metric,
            "entropy_pass": self.entropy_pass,
            "distance_pass": self.distance_pass,
            "channels_applied": [[i + 1 for i in s] for s in self.channels_applied],
        }


def _marginal_values(state: State, subset: PartySet) -> np.ndarray:
    if isinstance(state, ClassicalState):
        return state.marginal(subset).ravel()
    return partial_trace(state, subset)


def _match(rho: State, sigma: State) -> tuple[State, State]:
    if rho.dims != sigma.dims:
        raise StateError(f"profile mismatch: {rho.dims} vs {sigma.dims}")
    if isinstance(rho, ClassicalState) != isinstance(sigma, ClassicalState):
        return as_operator(rho), as_operator(sigma)
    return rho, sigma


def verify(
    rho: State, sigma: State, family: SubsetFamily, channels_applied=()
) -> SmoothingReport:
    """Recompute every entropy and distance for a candidate smoother ``sigma``."""
    rho, sigma = _match(rho, sigma)
    family.fits(rho.num_parties)
    eps = family.epsilon
    records = []
    for s in family.subsets:
        before = _marginal_values(rho, s)
        after = _marginal_values(sigma, s)
        records.append(
            SubsetRecord(
                subset=s,
                h_before=ent.min_entropy(before),
                target_trace=ent.smooth_min_entropy_trace(before, eps),
                target_purified=ent.smooth_min_entropy_purified(before, eps),
                h_after=ent.min_entropy(after),
            )
        )
    d = trace_distance(rho, sigma)
    p = purified_distance(rho, sigma)
    if family.metric == "trace":
        distance_pass = d <= family.bound_trace + REPORT_TOL
    else:
        distance_pass = p <= family.bound_purified + REPORT_TOL
    return SmoothingReport(
        records=records,
        distance_trace=d,
        distance_purified=p,
        bound_trace=family.bound_trace,
        bound_purified=family.bound_purified,
        metric=family.metric,
        entropy_pass=all(r.passed for r in records),
        distance_pass=bool(distance_pass),
        channels_applied=list(channels_applied),
    )


def check_commuting_marginals(rho: State, family: SubsetFamily) -> bool:
    """True iff the embedded marginals rho_S (x) 1 pairwise commute."""
    if isinstance(rho, ClassicalState):
        return True
    family.fits(rho.num_parties)
    embedded = [
        embed_local(partial_trace(rho, s).matrix, s, rho.dims) for s in family.subsets
    ]
    for a, b in itertools.combinations(embedded, 2):
        comm = a @ b - b @ a
        if np.max(np.abs(comm), initial=0.0) > COMMUTATOR_TOL:
            return False
    return True


def _apply_channels(rho: DensityOperator, order: Sequence[PartySet], eps: float) -> DensityOperator:
    channels = [ent.channel_for(rho, s, eps) for s in order]
    sigma = rho
    for ch in channels:
        sigma = ent.apply_extended(ch, sigma)
    return sigma


def _classical_multiplier(p: ClassicalState, subset: PartySet, eps: float) -> np.ndarray:
    marg = p.marginal(subset)
    cap = ent.trace_cap_level(marg.ravel(), eps)
    f = ent.smoothing_multiplier(cap)(marg)
    shape = [p.dims[i] if i in subset else 1 for i in range(p.num_parties)]
    return f.reshape(shape)


def smooth_classical(
    rho: State, family: SubsetFamily, order: Sequence[PartySet] | None = None
) -> tuple[State, SmoothingReport]:
    """Iterative smoothing for states with commuting marginals.

    Channels are applied largest subset first (ties lexicographic) unless an
    explicit ``order`` is given. ClassicalState inputs are handled on the
    probability tensor directly.
    """
    family.fits(rho.num_parties)
    if not check_commuting_marginals(rho, family):
        raise FamilyError(
            "marginals do not commute; use smooth_two_party or smooth_laminar instead"
        )
    if order is None:
        order = sorted(family.subsets, key=subset_order_key)
    else:
        order = [party_set(s) for s in order]
        if sorted(order) != sorted(family.subsets):
            raise FamilyError("order must be a permutation of the family")
    eps = family.epsilon
    if isinstance(rho, ClassicalState):
        multipliers = [_classical_multiplier(rho, s, eps) for s in order]
        probs = rho.probs
        for f in multipliers:
            probs = probs * f
        sigma = ClassicalState(rho.dims, probs)
    else:
        sigma = _apply_channels(rho, order, eps)
    return sigma, verify(rho, sigma, family, order)


_TWO_PARTY_ORDER = ((0, 1), (1,), (0,))


def smooth_two_party(rho: DensityOperator, family: SubsetFamily) -> tuple[DensityOperator, SmoothingReport]:
    """Bipartite smoothing: the joint channel first, then A2, then A1."""
    rho = as_operator(rho)
    if rho.num_parties != 2:
        raise FamilyError(f"two-party smoothing needs 2 parties, got {rho.num_parties}")
    if not set(family.subsets) <= set(_TWO_PARTY_ORDER):
        raise FamilyError("two-party families draw from {A1}, {A2}, {A1,A2}")
    order = [s for s in _TWO_PARTY_ORDER if s in family.subsets]
    sigma = _apply_channels(rho, order, family.epsilon)
    return sigma, verify(rho, sigma, family.with_metric("purified"), order)


def order_laminar(family: SubsetFamily | Iterable[PartySet]) -> list[PartySet]:
    """Supersets before subsets; raises OverlapError on a crossing pair."""
    subsets = family.subsets if isinstance(family, SubsetFamily) else [party_set(s) for s in family]
    ordered = sorted(subsets, key=subset_order_key)
    for s, t in itertools.combinations(ordered, 2):
        ss, ts = set(s), set(t)
        if not (ss <= ts or ts <= ss or not ss & ts):
            raise OverlapError(s, t)
    return ordered


def smooth_laminar(
    rho: DensityOperator, family: SubsetFamily, share_complements: bool = False
) -> tuple[DensityOperator, SmoothingReport]:
    """Smoothing for nested-or-disjoint families, largest subset first.

    With ``share_complements`` and a pure input, a subset whose complement was
    already smoothed is skipped: the two marginals of a pure state share their
    spectrum, so one channel serves both.
    """
    rho = as_operator(rho)
    family.fits(rho.num_parties)
    order = order_laminar(family)
    if share_complements and rho.rank() == 1:
        kept: list[PartySet] = []
        for s in order:
            if complement(s, rho.num_parties) not in kept:
                kept.append(s)
        order = kept
    sigma = _apply_channels(rho, order, family.epsilon)
    return sigma, verify(rho, sigma, family.with_metric("purified"), order)


@dataclass
class OverlapRecord:
    subset: PartySet
    target: float
    achieved: float

    @property
    def deficit(self) -> float:
        if math.isinf(self.target):
            return 0.0 if math.isinf(self.achieved) else math.inf
        return max(0.0, self.target - self.achieved)


@dataclass
class OverlapProbe:
    records: list[OverlapRecord]
    distance_purified: float
    distance_trace: float

    @property
    def max_deficit(self) -> float:
        return max(r.deficit for r in self.records)

    def to_dict(self) -> dict:
        return {
            "subsets": [
                {
                    "subset": [i + 1 for i in r.subset],
                    "target": _num(r.target),
                    "achieved": _num(r.achieved),
                    "deficit": _num(r.deficit),
                }
                for r in self.records
            ],
            "distance_purified": self.distance_purified,
            "distance_trace": self.distance_trace,
        }


OVERLAP_PAIR = ((0, 1), (1, 2))


def explore_overlapping(rho: DensityOperator, epsilon: float) -> OverlapProbe:
    """Smooth {A1A2, A2A3} naively (A2A3 first) and record the entropy shortfall.

    No guarantee is known for this family; deficits may be positive.
    """
    rho = as_operator(rho)
    if rho.num_parties != 3:
        raise FamilyError(f"the overlap probe needs 3 parties, got {rho.num_parties}")
    sigma = _apply_channels(rho, [(1, 2), (0, 1)], epsilon)
    records = [
        OverlapRecord(
            subset=s,
            target=ent.smooth_min_entropy_trace(partial_trace(rho, s), epsilon),
            achieved=ent.min_entropy(partial_trace(sigma, s)),
        )
        for s in OVERLAP_PAIR
    ]
    return OverlapProbe(records, purified_distance(rho, sigma), trace_distance(rho, sigma))
