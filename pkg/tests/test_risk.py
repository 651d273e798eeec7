"""Monte Carlo harness: reproducibility, calibration against exact risks."""

import numpy as np
import pytest
from scipy import stats

from hetshrink import (
    BayesRule,
    IdentityEstimator,
    JamesStein,
    ProblemSpec,
    UnknownConfigError,
    bayes_risk,
    chi2_quantile,
    gamma_path,
    list_variance_configs,
    pointwise_risk,
    risk_curve,
    stein_identity_check,
    theta_path,
    variance_config,
)
from hetshrink.risk import _generator, _normals


def test_normals_are_chunk_invariant():
    one = _normals(_generator(99, (1, 2)), 7, 3)
    gen = _generator(99, (1, 2))
    parts = np.vstack([_normals(gen, 4, 3), _normals(gen, 3, 3)])
    np.testing.assert_array_equal(one, parts)


def test_normals_depend_on_key():
    a = _normals(_generator(99, (0,)), 4, 2)
    b = _normals(_generator(99, (1,)), 4, 2)
    assert not np.array_equal(a, b)


def test_pointwise_risk_reproducible_and_estimator_paired():
    d = np.array([4.0, 2.0, 1.0, 1.0])
    theta = np.array([1.0, -1.0, 0.5, 0.0])
    ident = IdentityEstimator().fit()
    m1, s1 = pointwise_risk(ident, theta, d, n_rep=5000, seed=3)
    m2, s2 = pointwise_risk(ident, theta, d, n_rep=5000, seed=3)
    assert m1 == m2 and s1 == s2
    # X has exact risk tr(D); with 5000 draws we are within 4 SE
    assert abs(m1 - 8.0) <= 4.0 * s1


def test_unbiased_rule_risk_general_problem():
    sigma = np.array([[2.0, 0.7], [0.7, 1.0]])
    q = np.array([[1.0, 0.2], [0.2, 2.0]])
    spec = ProblemSpec.general(sigma, q)
    m, s = pointwise_risk(IdentityEstimator().fit(), [0.3, -0.4], spec,
                          n_rep=20000, seed=5)
    assert abs(m - spec.baseline_risk()) <= 4.0 * s


def test_james_stein_origin_risk_exact_two():
    js = JamesStein().fit()
    m, s = pointwise_risk(js, np.zeros(4), np.ones(4), n_rep=30000, seed=7)
    assert abs(m - 2.0) <= 3.5 * s


def test_bayes_rule_bayes_risk_closed_form():
    d = np.array([40.0, 20.0, 10.0, 5, 5, 5, 1, 1, 1, 1])
    g = 2.0 * np.ones(10)
    est = BayesRule(d, g).fit()
    m, s = bayes_risk(est, g, d, n_rep=30000, seed=11)
    exact = float(np.sum(d) - np.sum(d * d / (d + g)))
    assert abs(m - exact) <= 3.5 * s


def test_theta_path_shapes_and_norms():
    d = np.array([4.0, 2.0, 1.0, 1.0])
    for eta in (0.0, 1.0, 7.5):
        for kind in ("homoscedastic", "heteroscedastic", "axis:2"):
            th = theta_path(kind, d, eta)
            assert th.shape == (4,)
            np.testing.assert_allclose(np.linalg.norm(th), eta, atol=1e-12)
    th = theta_path("axis:2", d, 3.0)
    np.testing.assert_array_equal(th, [0.0, 3.0, 0.0, 0.0])
    het = theta_path("heteroscedastic", d, 2.0)
    np.testing.assert_allclose(het, 2.0 * np.sqrt(d / 8.0))
    with pytest.raises(UnknownConfigError):
        theta_path("axis:9", d, 1.0)
    with pytest.raises(UnknownConfigError):
        theta_path("bayes-homoscedastic", d, 1.0)
    with pytest.raises(UnknownConfigError):
        theta_path("sideways", d, 1.0)


def test_gamma_path_scales():
    d = np.array([4.0, 2.0, 1.0, 1.0])
    g = gamma_path("bayes-homoscedastic", d, 4.0)
    np.testing.assert_allclose(g, np.full(4, 4.0))
    g2 = gamma_path("bayes-heteroscedastic", d, 4.0)
    np.testing.assert_allclose(np.sum(g2), 16.0)
    np.testing.assert_allclose(g2, 16.0 * d / 8.0)
    with pytest.raises(UnknownConfigError):
        gamma_path("homoscedastic", d, 1.0)


def test_risk_curve_pairing_across_estimators():
    # identical draws at each point: the difference of curves for the same
    # estimator evaluated twice is exactly zero
    d = np.array([4.0, 2.0, 1.0, 1.0])
    ident = IdentityEstimator().fit()
    c1 = risk_curve(ident, "homoscedastic", d, [0.0, 2.0], n_rep=400, seed=13)
    c2 = risk_curve(ident, "homoscedastic", d, [0.0, 2.0], n_rep=400, seed=13)
    np.testing.assert_array_equal(c1.risk, c2.risk)
    rows = list(c1.csv_rows())
    assert rows[0][1] == "homoscedastic"
    assert float(rows[1][2]) == 2.0


def test_risk_curve_bayes_kind_runs():
    d = np.array([4.0, 2.0, 1.0, 1.0])
    est = BayesRule(d, 1.0 * np.ones(4)).fit()
    curve = risk_curve(est, "bayes-homoscedastic", d, [0.0, 2.0], n_rep=2000, seed=17)
    assert curve.risk.shape == (2,)
    # at eta = 0 the mean is exactly zero, so this is pointwise risk at 0
    m, _ = pointwise_risk(est, np.zeros(4), d, n_rep=2000, seed=17, key=(3, 0, 0))
    assert curve.risk[0] != 0.0


def test_chi2_quantile_against_scipy():
    for df in (3.0, 5.0, 11.0):
        for prob in (0.05, 0.5, 0.95):
            np.testing.assert_allclose(
                chi2_quantile(prob, df), stats.chi2.ppf(prob, df), rtol=1e-10
            )
    with pytest.raises(ValueError):
        chi2_quantile(0.0, 3.0)
    with pytest.raises(ValueError):
        chi2_quantile(0.5, -1.0)


def test_variance_configs_frozen():
    assert list_variance_configs() == [
        "eq5", "group22", "group3", "invchisq24df5", "invchisq8df3",
    ]
    np.testing.assert_array_equal(
        variance_config("eq5").d, [40, 20, 10, 1, 1, 1, 1, 1, 1, 1]
    )
    np.testing.assert_array_equal(
        variance_config("group22").d, [40, 20, 10, 7, 6, 5, 4, 3, 2, 1]
    )
    inv8 = variance_config("invchisq8df3").d
    assert inv8.shape == (10,)
    assert inv8[0] == pytest.approx(1.0237080675159198, rel=1e-12)
    assert np.all(np.diff(inv8) > 0)  # stored in ascending quantile order
    inv24 = variance_config("invchisq24df5").d
    assert inv24[0] == pytest.approx(24.0 / stats.chi2.ppf(0.95, 5), rel=1e-10)
    with pytest.raises(UnknownConfigError):
        variance_config("eq6")


def test_stein_identity_linear_fields():
    rng = np.random.default_rng(19)
    m = rng.standard_normal((3, 3))
    sigma = m @ m.T + 3 * np.eye(3)
    theta = np.array([1.0, -2.0, 0.5])
    rep = stein_identity_check(
        lambda x: x, lambda x: np.eye(3), sigma, theta, n_rep=4000, seed=23
    )
    assert rep.ok()
    a = rng.standard_normal((3, 3))
    rep2 = stein_identity_check(
        lambda x: a @ x, lambda x: a, sigma, theta, n_rep=4000, seed=23
    )
    assert rep2.ok()
    assert rep2.n_rep == 4000
