"""Min-entropy, smooth min-entropy and the single-system smoothing channel.

Logarithms are base 2. An infinite entropy (zero operator, or a smoothing
radius that swallows all the mass) is ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .operators import (
    DEFECT_SNAP,
    ClassicalState,
    DensityOperator,
    PartySet,
    Spectrum,
    StateError,
    eigen_decompose,
    embed_local,
    partial_trace,
    party_set,
    spectral_matrix,
)

MULTIPLIER_FLOOR = 1e-14
_CAP_BISECT_RTOL = 1e-13
_MASS_XATOL = 1e-12


def _values(spec) -> np.ndarray:
    """Descending nonnegative eigenvalues from a Spectrum, state or plain array."""
    if isinstance(spec, Spectrum):
        vals = spec.values
    elif isinstance(spec, DensityOperator):
        vals = eigen_decompose(spec).values
    elif isinstance(spec, ClassicalState):
        vals = np.sort(spec.probs.ravel())[::-1]
    else:
        vals = np.sort(np.asarray(spec, dtype=float).ravel())[::-1]
    return np.clip(vals, 0.0, None)


def min_entropy(t) -> float:
    lam = _values(t)
    top = float(lam[0]) if lam.size else 0.0
    return math.inf if top <= 0 else -math.log2(top)


@dataclass(frozen=True)
class CapSolution:
    """Eigenvalue cap for trace-distance smoothing.

    ``cap`` is the level 2^{-H} at which the spectrum is clipped,
    ``removed_mass`` the mass above it and ``infinite`` marks the case where
    the whole spectrum can be removed.
    """

    cap: float
    removed_mass: float
    infinite: bool

    @property
    def entropy(self) -> float:
        return math.inf if self.infinite or self.cap <= 0 else -math.log2(self.cap)


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    return epsilon


def trace_cap_level(spec, epsilon: float) -> CapSolution:
    """Smallest cap whose excess mass sum(max(lam_i - cap, 0)) is at most epsilon."""
    epsilon = _check_epsilon(epsilon)
    lam = _values(spec)
    total = float(lam.sum())
    if lam.size == 0 or epsilon >= total:
        return CapSolution(0.0, total, True)
    if epsilon == 0:
        return CapSolution(float(lam[0]), 0.0, False)
    prefix = np.cumsum(lam)
    nxt = np.append(lam[1:], 0.0)
    cap = 0.0
    for k in range(lam.size):
        level = (prefix[k] - epsilon) / (k + 1)
        if level >= nxt[k]:
            cap = min(level, float(lam[k]))
            break
    removed = float(np.clip(lam - cap, 0.0, None).sum())
    return CapSolution(cap, removed, False)


def smooth_min_entropy_trace(t, epsilon: float) -> float:
    return trace_cap_level(t, epsilon).entropy


def cap_function(cap: CapSolution):
    """The clipping map x -> min(x, cap), as an elementwise callable."""
    level = 0.0 if cap.infinite else cap.cap
    return lambda x: np.minimum(x, level)


def smoothing_multiplier(cap: CapSolution):
    """x -> f(x) = min(x, cap) / x, with f = 1 below the numerical floor."""

    def f(x):
        x = np.asarray(x, dtype=float)
        if cap.infinite:
            return np.where(x > MULTIPLIER_FLOOR, 0.0, 1.0)
        out = np.ones_like(x)
        big = x > MULTIPLIER_FLOOR
        out[big] = np.minimum(x[big], cap.cap) / x[big]
        return out

    return f


def smooth_state(t: DensityOperator, epsilon: float) -> tuple[DensityOperator, CapSolution]:
    """The eigenvalue-clipped state, optimal in the trace-distance ball."""
    spec = eigen_decompose(t)
    cap = trace_cap_level(spec, epsilon)
    return DensityOperator(t.dims, spectral_matrix(spec, cap_function(cap)), check=False), cap


# purified distance -------------------------------------------------------


def _waterfill(lam: np.ndarray, suffix: np.ndarray, level: float, mass: float) -> np.ndarray:
    """q_i = min(level, c lam_i) with sum q = mass; lam descending and positive."""
    n = lam.size
    for k in range(n):
        # k saturated entries, the rest proportional to lam
        c = (mass - k * level) / suffix[k]
        if c * lam[k] <= level:
            q = np.minimum(level, c * lam)
            q[:k] = level
            return q
    return np.full(n, level)


def _best_fidelity(lam: np.ndarray, defect: float, level: float) -> float:
    """Max generalized fidelity to lam over diagonal q with q_i <= level, sum q <= 1."""
    if level <= 0:
        return math.sqrt(defect)
    suffix = np.cumsum(lam[::-1])[::-1]
    top_mass = min(1.0, level * lam.size)

    def fid(mass: float) -> float:
        q = _waterfill(lam, suffix, level, mass)
        return float(np.sum(np.sqrt(lam * q))) + math.sqrt(defect * max(0.0, 1 - mass))

    best = max(fid(0.0), fid(top_mass))
    if defect > 0:
        res = minimize_scalar(
            lambda m: -fid(m), bounds=(0.0, top_mass), method="bounded",
            options={"xatol": _MASS_XATOL},
        )
        best = max(best, -float(res.fun))
    return best


def purified_cap_level(spec, epsilon: float) -> float:
    """Smallest eigenvalue cap reachable within purified distance epsilon (0 if everything can go)."""
    epsilon = _check_epsilon(epsilon)
    if epsilon >= 1:
        raise ValueError(f"purified smoothing needs epsilon < 1, got {epsilon}")
    lam = _values(spec)
    lam = lam[lam > MULTIPLIER_FLOOR]
    if lam.size == 0:
        return 0.0
    if epsilon == 0:
        return float(lam[0])
    defect = 1 - float(lam.sum())
    defect = 0.0 if defect <= DEFECT_SNAP else defect
    target = math.sqrt(1 - epsilon**2)
    if _best_fidelity(lam, defect, 0.0) >= target:
        return 0.0
    lo, hi = 0.0, float(lam[0])
    while hi - lo > _CAP_BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if _best_fidelity(lam, defect, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def smooth_min_entropy_purified(t, epsilon: float) -> float:
    """Smooth min-entropy over the purified-distance ball.

    The optimum can be taken diagonal in the eigenbasis of ``t``, so this
    bisects on the eigenvalue cap and, for each cap, maximizes the fidelity by
    water-filling q_i = min(cap, c lam_i) with a scalar search over total mass.
    """
    level = purified_cap_level(t, epsilon)
    return math.inf if level <= 0 else -math.log2(level)


# smoothing channels ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SmoothingChannel:
    """tau -> K tau K^dag with K = sqrt(f)(rho_S) acting on ``subsystem``."""

    subsystem: PartySet
    kraus: np.ndarray
    epsilon: float
    source_spectrum: Spectrum
    cap: CapSolution

    @property
    def infinite(self) -> bool:
        return self.cap.infinite

    def apply_local(self, tau: np.ndarray) -> np.ndarray:
        return self.kraus @ tau @ self.kraus.conj().T


def build_smoothing_channel(
    rho_s: DensityOperator, subsystem, epsilon: float
) -> SmoothingChannel:
    epsilon = _check_epsilon(epsilon)
    subsystem = party_set(subsystem)
    spec = eigen_decompose(rho_s)
    cap = trace_cap_level(spec, epsilon)
    if cap.infinite:
        kraus = np.zeros_like(rho_s.matrix)
    else:
        root = np.sqrt(smoothing_multiplier(cap)(spec.values))
        if np.all(root == 1.0):
            kraus = np.eye(rho_s.dim, dtype=complex)
        else:
            kraus = spectral_matrix(spec, lambda x: root)
    return SmoothingChannel(subsystem, kraus, epsilon, spec, cap)


def channel_for(rho: DensityOperator, subsystem, epsilon: float) -> SmoothingChannel:
    """Smoothing channel built from the marginal of ``rho`` on ``subsystem``."""
    subsystem = party_set(subsystem, rho.num_parties)
    return build_smoothing_channel(partial_trace(rho, subsystem), subsystem, epsilon)


def apply_extended(ch: SmoothingChannel, t: DensityOperator) -> DensityOperator:
    """Apply the channel on its subsystem and the identity on the rest of ``t``."""
    sdims = tuple(t.dims[i] for i in ch.subsystem) if max(ch.subsystem) < t.num_parties else None
    if sdims is None or math.prod(sdims) != ch.kraus.shape[0]:
        raise StateError(f"channel on {ch.subsystem} does not fit profile {t.dims}")
    k = embed_local(ch.kraus, ch.subsystem, t.dims)
    return DensityOperator(t.dims, k @ t.matrix @ k.conj().T, check=False)
