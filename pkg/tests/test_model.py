"""Problem/prior/direction container validation."""

import numpy as np
import pytest

from hetshrink import (
    ConfigurationError,
    Direction,
    EstimatorSpec,
    FLAT_PRIOR,
    PriorSpec,
    ProblemSpec,
    effective_gamma,
    validate_problem,
)


def test_canonical_problem_basics():
    spec = ProblemSpec.canonical([4.0, 1.0, 1.0])
    assert spec.mode == "canonical"
    assert spec.p == 3
    assert spec.baseline_risk() == 6.0
    assert not spec.d.flags.writeable


def test_problem_rejects_mixed_modes():
    with pytest.raises(ValueError):
        ProblemSpec(d=[1.0, 2.0], sigma=np.eye(2), q=np.eye(2))
    with pytest.raises(ValueError):
        ProblemSpec(sigma=np.eye(2))


def test_problem_rejects_bad_variances():
    with pytest.raises(Exception):
        ProblemSpec.canonical([1.0, 0.0, 2.0])
    with pytest.raises(Exception):
        ProblemSpec.canonical([1.0, -3.0])


def test_general_problem_baseline_is_weighted_trace():
    sigma = np.array([[2.0, 0.5], [0.5, 1.0]])
    q = np.array([[1.0, 0.2], [0.2, 3.0]])
    spec = ProblemSpec.general(sigma, q)
    assert spec.mode == "general"
    np.testing.assert_allclose(spec.baseline_risk(), np.trace(sigma @ q))


def test_problem_dict_round_trip():
    spec = ProblemSpec.canonical([3.0, 2.0, 1.0])
    again = ProblemSpec.from_dict(spec.to_dict())
    np.testing.assert_array_equal(again.d, spec.d)

    gen = ProblemSpec.general(np.diag([2.0, 1.0]), np.eye(2))
    back = ProblemSpec.from_dict(gen.to_dict())
    assert back.mode == "general"
    np.testing.assert_allclose(back.sigma, gen.sigma)


def test_prior_kinds():
    assert PriorSpec.zero().kind == "zero"
    assert PriorSpec.flat().is_flat
    exp = PriorSpec.explicit([0.0, 2.0])
    np.testing.assert_array_equal(exp.gamma, [0.0, 2.0])
    with pytest.raises(ValueError):
        PriorSpec(kind="bogus")
    with pytest.raises(ValueError):
        PriorSpec(kind="zero", gamma=[1.0])
    with pytest.raises(Exception):
        PriorSpec.explicit([-1.0, 2.0])


def test_effective_gamma_forms():
    np.testing.assert_array_equal(effective_gamma(None, 3), np.zeros(3))
    np.testing.assert_array_equal(effective_gamma(2.0, 3), np.full(3, 2.0))
    np.testing.assert_array_equal(effective_gamma([1.0, 2.0], 2), [1.0, 2.0])
    np.testing.assert_array_equal(
        effective_gamma(PriorSpec.explicit([1.0, 2.0]), 2), [1.0, 2.0]
    )
    assert effective_gamma(PriorSpec.flat(), 4) == FLAT_PRIOR
    assert effective_gamma(FLAT_PRIOR, 4) == FLAT_PRIOR
    with pytest.raises(ValueError):
        effective_gamma([1.0, 2.0, 3.0], 2)


def test_direction_exactly_one_form():
    with pytest.raises(ValueError):
        Direction(diag=[1.0], matrix=np.eye(1))
    with pytest.raises(ValueError):
        Direction()
    with pytest.raises(ValueError):
        Direction.diagonal([1.0, -0.5])
    d = Direction.diagonal([0.5, 1.0])
    assert d.is_diagonal and d.p == 2
    np.testing.assert_array_equal(d.as_matrix(), np.diag([0.5, 1.0]))
    m = Direction.general(np.array([[1.0, 0.1], [0.0, 2.0]]))
    assert not m.is_diagonal
    back = Direction.from_dict(m.to_dict())
    np.testing.assert_array_equal(back.matrix, m.matrix)


def test_estimator_spec_alternative_gate():
    EstimatorSpec(kind="B+", factor_version="alternative")
    EstimatorSpec(kind="MB", factor_version="alternative")
    with pytest.raises(ConfigurationError):
        EstimatorSpec(kind="EB", factor_version="alternative")
    with pytest.raises(ConfigurationError):
        EstimatorSpec(kind="B+", factor_version="doubled")


def test_estimator_spec_round_trip():
    spec = EstimatorSpec(
        kind="MB",
        parameters={"gamma": 25.6},
        prior=PriorSpec.zero(),
        factor_version="alternative",
        label="MB-alt",
    )
    again = EstimatorSpec.from_dict(spec.to_dict())
    assert again.kind == "MB"
    assert again.parameters == {"gamma": 25.6}
    assert again.prior.kind == "zero"
    assert again.label == "MB-alt"


def test_validate_problem_reports_ok():
    rep = validate_problem(ProblemSpec.canonical([2.0, 1.0]))
    assert rep.ok and rep.mode == "canonical" and rep.p == 2
    gen = validate_problem(ProblemSpec.general(np.diag([2.0, 1.0]), np.eye(2)))
    assert gen.ok and gen.mode == "general"
    assert gen.to_dict()["ok"]
