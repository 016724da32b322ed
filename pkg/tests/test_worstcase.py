import numpy as np
import pytest
from scipy.optimize import linprog

from simsmooth.operators import partial_trace
from simsmooth.oracle import build_smoother_lp, oracle_distance
from simsmooth.smoother import SubsetFamily, smooth_classical
from simsmooth.worstcase import (
    A1,
    A12,
    A2,
    ALL_ACTIVE,
    WorstCaseParams,
    build_worst_case,
    obstruction_factor,
    support_lines,
    verify_claim_one,
)


def test_n2_layout():
    params = WorstCaseParams(2)
    p = build_worst_case(params)
    assert params.side == 9 and params.center == 4
    probs = p.probs
    assert probs.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.count_nonzero(probs[4]) == 8 and np.count_nonzero(probs[:, 4]) == 8
    np.testing.assert_allclose(probs[4][probs[4] > 0], 1 / 24)
    np.testing.assert_array_equal(params.diagonal_cells(), [1, 3, 5, 7])
    np.testing.assert_allclose([probs[k, k] for k in (1, 3, 5, 7)], 1 / 12)
    assert np.count_nonzero(probs) == 20


def test_center_marginal():
    p = build_worst_case(WorstCaseParams(2))
    assert p.marginal([0])[4] == pytest.approx(1 / 3, abs=1e-15)
    op_marginal = partial_trace(p.to_operator(), [0]).matrix
    assert op_marginal[4, 4].real == pytest.approx(1 / 3, abs=1e-15)


def test_single_line():
    p = build_worst_case(WorstCaseParams(3, (A1,))).probs
    c = 9
    assert p.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(np.delete(p[c], c), 1 / 18)
    assert np.count_nonzero(p) == 18


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_lines_disjoint_and_dominant(n):
    params = WorstCaseParams(n)
    lines = support_lines(params)
    assert not (lines[A1] & lines[A2] or lines[A1] & lines[A12] or lines[A2] & lines[A12])
    p = build_worst_case(params)
    for s in (A1, A2):
        m = p.marginal(s)
        rest = np.delete(m, params.center)
        assert m[params.center] / rest.max() >= n / 2
    joint = p.probs.ravel()
    on_diag = params.diagonal_cells() * (params.side + 1)
    assert joint[on_diag].min() / np.delete(joint, on_diag).max() >= n / 2


def test_params_validation():
    with pytest.raises(ValueError):
        WorstCaseParams(1)
    with pytest.raises(ValueError):
        WorstCaseParams(2, ((0, 2),))
    assert WorstCaseParams(2, (A12, A1)).active == (A1, A12)


@pytest.mark.parametrize("n", [2, 3])
def test_single_active_costs_epsilon(n):
    params = WorstCaseParams(n, (A1,))
    p = build_worst_case(params)
    dstar = oracle_distance(p, SubsetFamily(params.active, 0.2))
    assert dstar == pytest.approx(0.2, abs=1e-9)
    assert verify_claim_one(params, 0.2, dstar).passed


def test_all_active_between_bounds():
    params = WorstCaseParams(2)
    p = build_worst_case(params)
    fam = SubsetFamily(ALL_ACTIVE, 0.05)
    dstar = oracle_distance(p, fam)
    _, rep = smooth_classical(p, fam)
    assert 0.05 - 1e-9 <= dstar <= rep.distance_trace + 1e-9
    assert rep.distance_trace <= 0.15 + 1e-9


def test_claim_guards():
    params = WorstCaseParams(2)
    with pytest.raises(ValueError):
        verify_claim_one(params, 1 / 3, 0.5)
    verdict = verify_claim_one(params, 0.0, 0.0)
    assert verdict.passed and verdict.gap == 0
    assert not verify_claim_one(params, 0.05, 0.1).passed


@pytest.mark.parametrize("d, expected", [(2, 0.9 / 1.1), (1000, 0.9 / 100.9)])
def test_obstruction_examples(d, expected):
    assert obstruction_factor(d, 0.1) == pytest.approx(expected, abs=1e-12)


def test_obstruction_limits():
    assert obstruction_factor(5, 0.0) == 1.0
    assert obstruction_factor(1000, 0.1) == pytest.approx(0.00892, abs=1e-5)
    values = [obstruction_factor(d, 0.1) for d in range(2, 60)]
    assert all(b < a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        obstruction_factor(1, 0.1)


def test_gap_closes_at_large_epsilon():
    # at eps = 0.3 the oracle starts well below 3 eps and climbs toward it
    fam = SubsetFamily(ALL_ACTIVE, 0.3)
    dstar = [oracle_distance(build_worst_case(WorstCaseParams(n)), fam) for n in range(2, 6)]
    model = build_smoother_lp(build_worst_case(WorstCaseParams(2)), fam)
    ref = linprog(model.lp.c, A_ub=model.lp.A_ub, b_ub=model.lp.b_ub, bounds=(0, None), method="highs")
    assert dstar[0] == pytest.approx(ref.fun + model.constant, abs=1e-9)
    assert dstar[0] == pytest.approx(97 / 150, abs=1e-9)
    assert all(b >= a for a, b in zip(dstar, dstar[1:]))
    gaps = [0.9 - d for d in dstar]
    assert gaps[-1] <= gaps[0] / 2
    assert all(0.3 <= d <= 0.9 for d in dstar)
