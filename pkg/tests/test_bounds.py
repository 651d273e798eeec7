"""Closed-form risk bounds: frozen values, branch coverage, error paths."""

import numpy as np
import pytest

from hetshrink import (
    AlphaBelowFloorError,
    DimensionTooSmallError,
    NegativeCStarError,
    PriorSpec,
    ShrinkageError,
    bayes_proximity_bound,
    bayes_risk_of_bayes_rule,
    bayes_upper_bound,
    block_l_sequence,
    c_star_canonical,
    corollary4_bound,
    inverse_moment_lower_bound,
    mb2_bayes_risk,
    solve_direction,
    theorem3_bounds,
    theorem4_bounds,
    worst_case_bound,
)

EQ5 = np.array([40.0, 20.0, 10.0, 1, 1, 1, 1, 1, 1, 1])
GROUP3 = np.array([40.0, 20.0, 10.0, 5, 5, 5, 1, 1, 1, 1])


def test_c_star_canonical_spot_values():
    # unit direction: tr(D) - 2 max(D)
    assert c_star_canonical(EQ5, np.ones(10)) == pytest.approx(-3.0)
    # inverse-variance direction: all d_j a_j equal -> p - 2
    assert c_star_canonical(EQ5, 1.0 / EQ5) == pytest.approx(8.0)
    with pytest.raises(ValueError):
        c_star_canonical(EQ5, -np.ones(10))


def test_bayes_upper_bound_identity_case():
    # d = 1, gamma = 0, optimal a = 0.8: 10 - (10/8) 6.4^2/6.4 = 2
    sol = solve_direction(np.ones(10), None)
    val = bayes_upper_bound(np.ones(10), None, sol.a_dag)
    assert val.value == pytest.approx(2.0, rel=1e-12)


def test_bayes_upper_bound_eq5_frozen():
    sol = solve_direction(EQ5, None)
    val = bayes_upper_bound(EQ5, None, sol.a_dag)
    assert val.value == pytest.approx(61.10714285714286, rel=1e-12)


def test_worst_case_bound_eq5_frozen():
    sol = solve_direction(EQ5, None)
    val = worst_case_bound(EQ5, None, sol.a_dag)
    assert val.value == pytest.approx(64.28571428571429, rel=1e-12)


def test_negative_c_star_paths():
    ones = np.ones(10)
    with pytest.raises(NegativeCStarError):
        bayes_upper_bound(EQ5, None, ones)  # c* = -3
    with pytest.raises(NegativeCStarError):
        worst_case_bound(EQ5, None, ones)


def test_theorem3_eq5_frozen():
    both = theorem3_bounds(EQ5, None)
    assert both["loose"].value == pytest.approx(66.66666666666667, rel=1e-12)
    assert both["tight"].value == pytest.approx(64.08333333333333, rel=1e-12)
    assert any("nu = 3" in a for a in both["tight"].assumptions)


def test_theorem3_nu4_branch():
    d = np.ones(10)
    both = theorem3_bounds(d, None)  # nu = 10 >= 4
    assert any("nu >= 4" in a for a in both["tight"].assumptions)
    assert both["tight"].value <= both["loose"].value + 1e-12


def test_theorem4_collapses_at_nu3():
    both = theorem4_bounds(EQ5, None)
    assert both["tight"].value == pytest.approx(both["loose"].value)
    # nu >= 4: tight is strictly inside loose by 4 d*_nu / nu
    d = np.ones(10)
    b4 = theorem4_bounds(d, None)
    assert b4["tight"].value == pytest.approx(b4["loose"].value - 4.0 * 1.0 / 10.0)


def test_bayes_rule_exact_risk_helper():
    d = np.array([4.0, 1.0])
    g = np.array([4.0, 3.0])
    want = np.sum(d) - np.sum(d * d / (d + g))
    assert bayes_risk_of_bayes_rule(d, g) == pytest.approx(want)


def test_bayes_proximity_frozen():
    assert bayes_proximity_bound(EQ5, None).value == pytest.approx(71.0)
    assert bayes_proximity_bound(np.ones(10), np.ones(10)).value == pytest.approx(7.0)
    with pytest.raises(DimensionTooSmallError):
        bayes_proximity_bound(np.ones(3), None)


def test_corollary4_reduces_to_proximity_at_alpha_one():
    val = corollary4_bound(EQ5, None, alpha=1.0)
    assert val.value == pytest.approx(bayes_proximity_bound(EQ5, None).value)
    with pytest.raises(AlphaBelowFloorError):
        corollary4_bound(EQ5, None, alpha=0.5)


def test_corollary4_with_prior_floor():
    d = np.array([4.0, 2.0, 1.0, 1.0])
    g = np.ones(4)
    floor = np.max(d / (d + g))  # 0.8
    val = corollary4_bound(d, g, alpha=floor)
    ds = d * d / (d + g)
    want = np.sum(d) - np.sum(ds) / floor + np.sum(np.sort(ds)[::-1][:4]) / floor
    assert val.value == pytest.approx(want)


def test_mb2_bayes_risk_frozen():
    assert mb2_bayes_risk(np.ones(10), None) == pytest.approx(2.0, rel=1e-12)
    assert mb2_bayes_risk(np.array([4.0, 1.0, 1.0]), None) == pytest.approx(4.75)


def test_block_l_sequence_group3():
    ls = block_l_sequence(GROUP3, np.zeros(10))
    assert np.argmax(ls) + 1 == 6
    assert ls[5] == pytest.approx(32.96774193548387)
    # single-block split at k = p equals the full-dimension criterion
    want_p = (10 - 2) / (np.mean(1.0 / GROUP3))
    assert ls[-1] == pytest.approx(want_p)


def test_inverse_moment_lower_bound_value():
    sol = solve_direction(np.ones(10), None)
    # sum (d+gamma) a^2 = 6.4 -> (10/8)/6.4
    val = inverse_moment_lower_bound(np.ones(10), None, sol.a_dag)
    assert val == pytest.approx((10.0 / 8.0) / 6.4)


def test_flat_prior_rejected_where_finite_needed():
    with pytest.raises(ValueError):
        bayes_upper_bound(EQ5, PriorSpec.flat(), np.ones(10))
