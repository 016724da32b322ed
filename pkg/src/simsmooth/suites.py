"""Seeded property suites behind ``simsmooth verify``.

Each suite maps (trial seed, dims, epsilon, family) to one result row; a
row's ``passed`` flag says whether the property held on that instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import entropy as ent
from .operators import (
    DensityOperator,
    embed_local,
    partial_trace,
    purified_distance,
    random_classical,
    random_state,
    trace_distance,
)
from .smoother import (
    SubsetFamily,
    all_subsets,
    smooth_classical,
    smooth_laminar,
    smooth_two_party,
)

TOL = 1e-9


def trial_seed(seed: int, trial: int) -> int:
    """Independent per-trial seed derived from (seed, trial)."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def random_contraction(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random K with K^dag K <= 1."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return g / np.linalg.norm(g, 2) * rng.uniform(0.5, 1.0)


@dataclass(frozen=True)
class Suite:
    name: str
    dims: tuple[int, ...]
    subsets: tuple[tuple[int, ...], ...] | None
    run: Callable[[int, tuple[int, ...], float, SubsetFamily | None], dict]
    help: str


def _theorem_row(rep) -> dict:
    return {
        "passed": rep.entropy_pass and rep.distance_pass,
        "entropy_pass": rep.entropy_pass,
        "distance_pass": rep.distance_pass,
        "distance_trace": rep.distance_trace,
        "distance_purified": rep.distance_purified,
        "worst_margin": min(r.h_after - r.target_trace for r in rep.records),
    }


def _theorem2(seed, dims, eps, family):
    p = random_classical(dims, seed=seed)
    _, rep = smooth_classical(p, family)
    return _theorem_row(rep)


def _theorem4(seed, dims, eps, family):
    rho = random_state(dims, "mixed", seed)
    _, rep = smooth_two_party(rho, family)
    return _theorem_row(rep)


def _theorem5(seed, dims, eps, family):
    rho = random_state(dims, "mixed", seed)
    _, rep = smooth_laminar(rho, family)
    return _theorem_row(rep)


def _lemma1(seed, dims, eps, family):
    rho = random_state(dims, "mixed", seed)
    sigma, cap = ent.smooth_state(rho, eps)
    d = trace_distance(rho, sigma)
    top = ent.eigen_decompose(sigma).max
    err = abs(top - cap.cap)
    return {"passed": d <= eps + 1e-10 and err <= 1e-12, "distance_trace": d, "cap_error": err}


def _lemma3(seed, dims, eps, family):
    """Commutativity, order decrease and distance preservation on classical states."""
    rng = np.random.default_rng(seed)
    rho = random_classical(dims, seed=rng).to_operator()
    tau = random_classical(dims, seed=rng).to_operator()
    worst_comm = worst_order = worst_dist = 0.0
    channels = [ent.channel_for(rho, s, eps) for s in family.subsets]
    for i, ch in enumerate(channels):
        out = ent.apply_extended(ch, tau)
        worst_order = min(worst_order, float(np.linalg.eigvalsh(tau.matrix - out.matrix)[0]))
        local = partial_trace(tau, ch.subsystem)
        local_out = DensityOperator(local.dims, ch.apply_local(local.matrix), check=False)
        worst_dist = max(worst_dist, abs(trace_distance(tau, out) - trace_distance(local, local_out)))
        for other in channels[i + 1 :]:
            st = ent.apply_extended(ch, ent.apply_extended(other, rho)).matrix
            ts = ent.apply_extended(other, ent.apply_extended(ch, rho)).matrix
            worst_comm = max(worst_comm, float(np.max(np.abs(st - ts))))
    return {
        "passed": worst_comm <= 1e-10 and worst_order >= -1e-10 and worst_dist <= 1e-10,
        "commutator": worst_comm,
        "order_min_eig": worst_order,
        "distance_gap": worst_dist,
    }


def _lemma4(seed, dims, eps, family):
    rho = random_state(dims, "mixed", seed)
    ch = ent.channel_for(rho, (0,), eps)
    out = ent.apply_extended(ch, rho)
    local = partial_trace(rho, (0,))
    local_out = DensityOperator(local.dims, ch.apply_local(local.matrix), check=False)
    gap = abs(purified_distance(rho, out) - purified_distance(local, local_out))
    return {"passed": gap <= 1e-8, "purified_gap": gap}


def _lemma5(seed, dims, eps, family):
    rng = np.random.default_rng(seed)
    rho = random_state(dims, "mixed", rng)
    k = embed_local(random_contraction(dims[1], rng), (1,), dims)
    out = DensityOperator(dims, k @ rho.matrix @ k.conj().T, check=False)
    before = partial_trace(rho, (0,)).matrix
    after = partial_trace(out, (0,)).matrix
    min_eig = float(np.linalg.eigvalsh(before - after)[0])
    grew = ent.eigen_decompose(after).max - ent.eigen_decompose(before).max
    return {"passed": min_eig >= -1e-10 and grew <= 1e-10, "min_eig": min_eig, "lambda_max_change": grew}


def _sandwich(seed, dims, eps, family):
    rng = np.random.default_rng(seed)
    a = random_state(dims, "mixed", rng)
    b = random_state(dims, "mixed", rng)
    a = DensityOperator(dims, a.matrix * rng.uniform(0.3, 1.0))
    b = DensityOperator(dims, b.matrix * rng.uniform(0.3, 1.0))
    d, p = trace_distance(a, b), purified_distance(a, b)
    return {"passed": d <= p + TOL and p <= math.sqrt(2 * d) + TOL, "trace": d, "purified": p}


def _contractivity(seed, dims, eps, family):
    rng = np.random.default_rng(seed)
    a = random_state(dims, "mixed", rng)
    b = random_state(dims, "mixed", rng)
    k = random_contraction(a.dim, rng)
    ka = DensityOperator(dims, k @ a.matrix @ k.conj().T, check=False)
    kb = DensityOperator(dims, k @ b.matrix @ k.conj().T, check=False)
    d0, p0 = trace_distance(a, b), purified_distance(a, b)
    dk, pk = trace_distance(ka, kb), purified_distance(ka, kb)
    ta, tb = partial_trace(a, (0,)), partial_trace(b, (0,))
    dt, pt = trace_distance(ta, tb), purified_distance(ta, tb)
    ok = dk <= d0 + TOL and pk <= p0 + TOL and dt <= d0 + TOL and pt <= p0 + TOL
    return {"passed": ok, "trace_increase": max(dk, dt) - d0, "purified_increase": max(pk, pt) - p0}


def _purified(seed, dims, eps, family):
    rho = random_state(dims, "mixed", seed)
    hp = ent.smooth_min_entropy_purified(rho, eps)
    hd = ent.smooth_min_entropy_trace(rho, eps)
    return {"passed": hp <= hd + 1e-8, "h_purified": hp, "h_trace": hd}


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("lemma1", (2, 2), None, _lemma1, "clipped state is eps-close and optimal"),
        Suite("lemma3", (2, 3, 2), None, _lemma3, "classical channels commute, decrease, preserve distance"),
        Suite("lemma4", (2, 3), None, _lemma4, "purified distance equals its local value"),
        Suite("lemma5", (2, 3), None, _lemma5, "local maps on A2 shrink the A1 marginal"),
        Suite("theorem2", (2, 3, 2), None, _theorem2, "classical simultaneous smoothing"),
        Suite("theorem4", (3, 3), ((0,), (1,), (0, 1)), _theorem4, "two-party quantum smoothing"),
        Suite("theorem5", (2, 2, 2), ((0, 1, 2), (0, 1), (2,)), _theorem5, "laminar quantum smoothing"),
        Suite("sandwich", (2, 2), None, _sandwich, "D <= P <= sqrt(2D)"),
        Suite("contractivity", (2, 2), None, _contractivity, "D and P never grow under contractions"),
        Suite("purified", (2, 3), None, _purified, "purified smooth entropy below trace version"),
    ]
}


def default_subsets(suite: Suite, num_parties: int):
    return suite.subsets if suite.subsets is not None else all_subsets(num_parties)
