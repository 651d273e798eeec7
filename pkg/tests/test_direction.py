"""Optimal-direction solver: frozen values and structural invariants."""

import numpy as np
import pytest

from hetshrink import (
    DimensionTooSmallError,
    DirectionSolution,
    PriorSpec,
    ShrinkageError,
    bayes_importance,
    find_cutoff,
    m_sequence,
    max_value_diagnostic,
    solve_direction,
)

EQ5 = np.array([40.0, 20.0, 10.0, 1, 1, 1, 1, 1, 1, 1])
GROUP3 = np.array([40.0, 20.0, 10.0, 5, 5, 5, 1, 1, 1, 1])


def test_importance_explicit_prior():
    ds, perm = bayes_importance([4.0, 1.0], [0.0, 3.0])
    np.testing.assert_allclose(ds, [4.0, 0.25])
    np.testing.assert_array_equal(perm, [0, 1])


def test_importance_zero_and_flat():
    ds0, _ = bayes_importance([4.0, 1.0], None)
    np.testing.assert_allclose(ds0, [4.0, 1.0])
    dsf, _ = bayes_importance([4.0, 1.0], PriorSpec.flat())
    np.testing.assert_allclose(dsf, [16.0, 1.0])


def test_m_sequence_frozen_values_zero_prior():
    m = m_sequence(EQ5, None)
    # k = 3: 1 / (1/40 + 1/20 + 1/10) + 7
    np.testing.assert_allclose(m[0], 12.714285714285714, rtol=1e-14)
    # k = 4: 4 / (0.175 + 1) + 6
    np.testing.assert_allclose(m[1], 9.404255319148936, rtol=1e-14)
    assert m.shape == (8,)


def test_identity_variances_shrink_everything():
    d = np.ones(10)
    m = m_sequence(d, None)
    np.testing.assert_allclose(m[0], 22.0 / 3.0, rtol=1e-14)
    np.testing.assert_allclose(m[-1], 6.4, rtol=1e-14)
    assert find_cutoff(d, None) == 10
    sol = solve_direction(d, None)
    np.testing.assert_allclose(sol.a_dag, 0.8 * np.ones(10), rtol=1e-14)
    np.testing.assert_allclose(sol.c_star, 6.4, rtol=1e-14)


def test_eq5_solution_frozen():
    sol = solve_direction(EQ5, None)
    assert sol.nu == 3
    np.testing.assert_allclose(sol.c_star, 12.714285714285714, rtol=1e-14)
    np.testing.assert_allclose(
        sol.a_dag[:3], [1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0], rtol=1e-14
    )
    np.testing.assert_allclose(sol.a_dag[3:], np.ones(7), rtol=1e-14)
    # tr(D A) and its top eigenvalue at the solution
    da = EQ5 * sol.a_dag
    np.testing.assert_allclose(np.sum(da), 24.142857142857142, rtol=1e-14)
    np.testing.assert_allclose(np.max(da), 40.0 / 7.0, rtol=1e-14)


def test_group3_flat_prior_frozen():
    sol = solve_direction(GROUP3, PriorSpec.flat())
    assert sol.nu == 3
    np.testing.assert_allclose(sol.c_star, 1.0 / 0.013125 + 79.0, rtol=1e-12)
    # beyond the cutoff the flat-limit direction is a_j = d_j
    np.testing.assert_allclose(sol.a_dag[3:], GROUP3[3:], rtol=1e-14)


def test_cutoff_requires_strict_improvement():
    # d* = (3, 3, 3, 1): M_3 = M_4 = 2, tie goes to the larger cutoff
    d = np.array([3.0, 3.0, 3.0, 1.0])
    m = m_sequence(d, None)
    np.testing.assert_allclose(m, [2.0, 2.0], rtol=1e-14)
    sol = solve_direction(d, None)
    assert sol.nu == 4
    np.testing.assert_allclose(sol.a_dag, 1.0 / d, rtol=1e-14)


def test_solution_invariants_random_sweep():
    rng = np.random.default_rng(42)
    for _ in range(200):
        p = int(rng.integers(3, 12))
        d = rng.uniform(0.1, 50.0, p)
        gamma = rng.uniform(0.0, 20.0, p) if rng.random() < 0.7 else None
        sol = solve_direction(d, gamma)
        g = np.zeros(p) if gamma is None else gamma
        # the three faces of c*: M_nu, the quadratic form, tr - 2 max
        quad = np.sum(sol.a_dag**2 * (d + g))
        np.testing.assert_allclose(quad, sol.c_star, rtol=1e-9)
        da = d * sol.a_dag
        np.testing.assert_allclose(
            np.sum(da) - 2 * np.max(da), sol.c_star, rtol=1e-9, atol=1e-9
        )
        assert np.all(sol.a_dag >= 0)
        assert 3 <= sol.nu <= p
        assert sol.c_star <= np.sum(d + g) + 1e-9


def test_flat_solution_invariants_random_sweep():
    rng = np.random.default_rng(43)
    for _ in range(100):
        p = int(rng.integers(3, 12))
        d = rng.uniform(0.1, 50.0, p)
        sol = solve_direction(d, PriorSpec.flat())
        da = d * sol.a_dag
        np.testing.assert_allclose(
            np.sum(da) - 2 * np.max(da), sol.c_star, rtol=1e-9
        )


def test_unsorted_input_round_trips():
    d = np.array([1.0, 40.0, 1.0, 20.0, 10.0, 1, 1, 1, 1, 1])
    sol = solve_direction(d, None)
    ref = solve_direction(EQ5, None)
    np.testing.assert_allclose(sol.c_star, ref.c_star, rtol=1e-14)
    np.testing.assert_allclose(np.sort(sol.a_dag), np.sort(ref.a_dag), rtol=1e-14)
    # the direction lines up with its own coordinates
    np.testing.assert_allclose(sol.a_dag[1], 1.0 / 7.0, rtol=1e-14)


def test_small_dimension_rejected():
    with pytest.raises(DimensionTooSmallError):
        solve_direction([1.0, 2.0], None)
    with pytest.raises(DimensionTooSmallError):
        m_sequence([1.0, 2.0], None)


def test_max_value_diagnostic_catches_tampering():
    sol = solve_direction(EQ5, None)
    assert max_value_diagnostic(sol, EQ5) == pytest.approx(sol.c_star, rel=1e-12)
    bad = DirectionSolution(
        a_dag=sol.a_dag,
        nu=sol.nu,
        m_seq=sol.m_seq,
        c_star=sol.c_star + 0.5,
        perm=sol.perm,
        d_star=sol.d_star,
    )
    with pytest.raises(ShrinkageError):
        max_value_diagnostic(bad, EQ5)


def test_solution_dict_round_trip():
    sol = solve_direction(GROUP3, [1.0] * 10)
    again = DirectionSolution.from_dict(sol.to_dict())
    np.testing.assert_allclose(again.a_dag, sol.a_dag)
    assert again.nu == sol.nu
    assert again.c_star == pytest.approx(sol.c_star)
