import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq, minimize

from simsmooth import entropy as ent
from simsmooth.operators import (
    ClassicalState,
    DensityOperator,
    eigen_decompose,
    maximally_entangled,
    partial_trace,
    random_classical,
    random_state,
    trace_distance,
)

from conftest import diag_state

seeds = st.integers(0, 2**32 - 1)


def cap_by_root_finding(lam, eps):
    """Independent cap: root of sum(max(lam - c, 0)) - eps on [0, lam_max]."""
    lam = np.asarray(lam, dtype=float)
    excess = lambda c: np.clip(lam - c, 0, None).sum() - eps
    return brentq(excess, 0.0, lam.max(), xtol=1e-15, rtol=1e-15)


def purified_cap_by_slsqp(lam, eps):
    """Independent purified cap: bisection over a generic constrained fidelity maximization."""
    lam = np.asarray(lam, dtype=float)
    defect = max(0.0, 1 - lam.sum())
    target = math.sqrt(1 - eps**2)

    def best(level):
        def neg_fid(q):
            q = np.clip(q, 0, None)
            return -(np.sum(np.sqrt(lam * q)) + math.sqrt(defect * max(0.0, 1 - q.sum())))

        x0 = np.full(lam.size, min(level, 1.0 / lam.size) * 0.5)
        res = minimize(
            neg_fid, x0, method="SLSQP", bounds=[(0, level)] * lam.size,
            constraints=[{"type": "ineq", "fun": lambda q: 1 - q.sum()}],
            options={"ftol": 1e-14, "maxiter": 500},
        )
        return -res.fun

    lo, hi = 0.0, lam.max()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if best(mid) >= target else (mid, hi)
    return hi


def test_min_entropy_examples():
    assert ent.min_entropy(DensityOperator((4,), np.eye(4) / 4)) == pytest.approx(2.0)
    assert ent.min_entropy(diag_state([0.5, 0.25, 0.25])) == pytest.approx(1.0)
    assert ent.min_entropy(partial_trace(maximally_entangled(2), [0])) == pytest.approx(1.0)
    assert ent.min_entropy(np.zeros(3)) == math.inf


@pytest.mark.parametrize(
    "lam, eps, cap",
    [((0.5, 0.25, 0.25), 0.1, 0.4), ((0.5, 0.3, 0.2), 0.35, 0.225), ((0.5, 0.3, 0.2), 0.0, 0.5)],
)
def test_trace_cap_examples(lam, eps, cap):
    sol = ent.trace_cap_level(lam, eps)
    assert not sol.infinite
    assert sol.cap == pytest.approx(cap, abs=1e-15)


def test_trace_cap_infinite_and_negative_epsilon():
    assert ent.trace_cap_level([0.5, 0.25], 0.75).infinite
    assert ent.smooth_min_entropy_trace([0.5, 0.25], 0.8) == math.inf
    with pytest.raises(ValueError):
        ent.trace_cap_level([1.0], -0.1)


@settings(max_examples=200, deadline=None)
@given(seed=seeds, eps=st.floats(0.001, 0.9))
def test_trace_cap_matches_root_finding(seed, eps):
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(rng.integers(1, 9))) * rng.uniform(0.5, 1)
    sol = ent.trace_cap_level(lam, eps)
    if eps >= lam.sum():
        assert sol.infinite
        return
    assert sol.cap == pytest.approx(cap_by_root_finding(lam, eps), abs=1e-12)
    assert sol.removed_mass == pytest.approx(eps, abs=1e-12)


def test_smooth_trace_examples():
    assert ent.smooth_min_entropy_trace(diag_state([0.5, 0.25, 0.25]), 0.1) == pytest.approx(1.3219281, abs=1e-7)
    t = random_state((3,), "mixed", 0)
    assert ent.smooth_min_entropy_trace(t, 0) == ent.min_entropy(t)
    assert ent.smooth_min_entropy_trace(random_state((3,), "pure", 1), 0.2) == pytest.approx(
        -math.log2(0.8), abs=1e-12
    )


@settings(max_examples=60, deadline=None)
@given(seed=seeds)
def test_smooth_entropy_monotone_in_epsilon(seed):
    t = random_state((2, 2), "mixed", seed)
    grid = np.linspace(0, 0.9, 10)
    hd = [ent.smooth_min_entropy_trace(t, e) for e in grid]
    hp = [ent.smooth_min_entropy_purified(t, e) for e in grid]
    assert all(b >= a - 1e-12 for a, b in zip(hd, hd[1:]))
    assert all(b >= a - 1e-9 for a, b in zip(hp, hp[1:]))
    assert hd[0] == ent.min_entropy(t)


def test_purified_examples():
    t = random_state((3,), "mixed", 0)
    assert ent.smooth_min_entropy_purified(t, 0) == ent.min_entropy(t)
    pure = random_state((2, 2), "pure", 5)
    assert ent.smooth_min_entropy_purified(pure, 0.6) == pytest.approx(0.6438562, abs=1e-7)
    with pytest.raises(ValueError):
        ent.smooth_min_entropy_purified(t, 1.0)


@pytest.mark.parametrize("d", [2, 3, 5, 16])
@pytest.mark.parametrize("eps", [0.05, 0.2, 0.6])
def test_purified_closed_forms(d, eps):
    uniform = DensityOperator((d,), np.eye(d) / d)
    offset = -math.log2(1 - eps**2)
    assert ent.smooth_min_entropy_purified(uniform, eps) == pytest.approx(math.log2(d) + offset, abs=1e-8)
    pure = random_state((d,), "pure", d)
    assert ent.smooth_min_entropy_purified(pure, eps) == pytest.approx(offset, abs=1e-8)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("eps", [0.05, 0.3])
def test_purified_cap_matches_generic_optimizer(seed, eps):
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(3)) * (1.0 if seed % 2 else rng.uniform(0.6, 0.95))
    ours = ent.purified_cap_level(lam, eps)
    ref = purified_cap_by_slsqp(lam, eps)
    assert ours == pytest.approx(ref, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, eps=st.floats(0.01, 0.5))
def test_purified_below_trace(seed, eps):
    t = random_state((2, 3), "mixed", seed)
    assert ent.smooth_min_entropy_purified(t, eps) <= ent.smooth_min_entropy_trace(t, eps) + 1e-8


def test_channel_zero_epsilon_is_identity():
    t = random_state((3,), "mixed", 2)
    ch = ent.build_smoothing_channel(t, (0,), 0.0)
    np.testing.assert_array_equal(ch.kraus, np.eye(3))


def test_channel_cap_example():
    t = diag_state([0.5, 0.25, 0.25])
    ch = ent.build_smoothing_channel(t, (0,), 0.1)
    out = ent.apply_extended(ch, t)
    np.testing.assert_allclose(out.matrix, np.diag([0.4, 0.25, 0.25]), atol=1e-15)
    assert trace_distance(t, out) == pytest.approx(0.1, abs=1e-15)


@pytest.mark.parametrize("eps", [0.05, 0.3])
def test_channel_on_pure_state_scales(eps):
    rho = random_state((4,), "pure", 3)
    out = ent.apply_extended(ent.build_smoothing_channel(rho, (0,), eps), rho)
    np.testing.assert_allclose(out.matrix, (1 - eps) * rho.matrix, atol=1e-14)


def test_channel_infinite_cap():
    ch = ent.build_smoothing_channel(diag_state([0.3, 0.2]), (0,), 0.6)
    assert ch.infinite
    assert not ch.kraus.any()


def test_extended_classical_uniform():
    p = ClassicalState((2, 2), np.full((2, 2), 0.25))
    rho = p.to_operator()
    out = ent.apply_extended(ent.channel_for(rho, [0], 0.1), rho)
    np.testing.assert_allclose(out.matrix, 0.9 * rho.matrix, atol=1e-15)


@pytest.mark.parametrize("d", [2, 3])
def test_extended_maximally_entangled(d):
    psi = maximally_entangled(d)
    out = ent.apply_extended(ent.channel_for(psi, [0], 0.2), psi)
    np.testing.assert_allclose(out.matrix, 0.8 * psi.matrix, atol=1e-14)


def test_extended_identity_and_mismatch():
    t = random_state((2, 3), "mixed", 1)
    ch = ent.build_smoothing_channel(partial_trace(t, [1]), (1,), 0.0)
    np.testing.assert_array_equal(ent.apply_extended(ch, t).matrix, t.matrix)
    with pytest.raises(ValueError):
        ent.apply_extended(ch, random_state((3, 2), "mixed", 1))


@settings(max_examples=100, deadline=None)
@given(seed=seeds, eps=st.sampled_from([0.01, 0.05, 0.2]))
def test_smoothed_state_is_optimal_and_close(seed, eps):
    t = random_state((2, 2), "mixed", seed)
    sigma, cap = ent.smooth_state(t, eps)
    assert trace_distance(t, sigma) <= eps + 1e-10
    assert eigen_decompose(sigma).max == pytest.approx(cap.cap, abs=1e-12)
    out = ent.apply_extended(ent.channel_for(t, [0, 1], eps), t)
    np.testing.assert_allclose(out.matrix, sigma.matrix, atol=1e-12)


def test_classical_channel_sums_cap():
    p = random_classical((3, 2), seed=4)
    marg = p.marginal([0]).ravel()
    cap = ent.trace_cap_level(marg, 0.1)
    f = ent.smoothing_multiplier(cap)(marg)
    assert np.max(marg * f) == pytest.approx(cap.cap, abs=1e-15)
    assert np.sum(marg - marg * f) == pytest.approx(0.1, abs=1e-14)
