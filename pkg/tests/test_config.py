"""Scenario configs: shorthand parsing, file loading, preset resolution."""

import numpy as np
import pytest

from hetshrink import (
    ConfigurationError,
    PriorSpec,
    ScenarioConfig,
    UnknownConfigError,
    list_presets,
    load_config,
    parse_prior,
    resolve_config,
)


def test_parse_prior_shorthand():
    assert parse_prior(None).kind == "zero"
    assert parse_prior("zero").kind == "zero"
    assert parse_prior("flat").is_flat
    assert parse_prior(0).kind == "zero"
    assert parse_prior(2.5) == 2.5  # scalar deferred until p is known
    exp = parse_prior([1.0, 2.0])
    np.testing.assert_array_equal(exp.gamma, [1.0, 2.0])
    spec = PriorSpec.flat()
    assert parse_prior(spec) is spec


def test_scenario_from_dict_and_prior_expansion():
    cfg = ScenarioConfig.from_dict(
        {
            "variance_config": "group3",
            "prior": 2.0,
            "estimators": ["MB", {"name": "B+", "factor_version": "alternative"}],
            "curve": {"kinds": ["axis:1"], "eta_max": 4.0, "eta_steps": 5},
            "n_rep": 123,
            "seed": 9,
        }
    )
    assert cfg.name == "group3"
    prior = cfg.prior_spec(10)
    np.testing.assert_array_equal(prior.gamma, np.full(10, 2.0))
    assert cfg.estimators[0].kind == "MB"
    assert cfg.estimators[1].factor_version == "alternative"
    np.testing.assert_allclose(cfg.curve.eta_grid(), [0.0, 1.0, 2.0, 3.0, 4.0])
    assert cfg.n_rep == 123 and cfg.seed == 9


def test_scenario_requires_variance_config():
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_dict({"name": "x"})


def test_estimator_entry_scalar_prior_becomes_parameter():
    cfg = ScenarioConfig.from_dict(
        {
            "variance_config": "group3",
            "estimators": [{"name": "MB", "prior": 25.6, "label": "MB(flat)"}],
        }
    )
    assert cfg.estimators[0].parameters["gamma"] == 25.6
    assert cfg.estimators[0].label == "MB(flat)"


def test_load_config_yaml_and_json(tmp_path):
    y = tmp_path / "s.yaml"
    y.write_text("variance_config: eq5\nestimators: [MB]\n")
    cfg = load_config(str(y))
    assert cfg.variance_config == "eq5"

    j = tmp_path / "s.json"
    j.write_text('{"variance_config": "eq5", "n_rep": 11}')
    cfg2 = load_config(str(j))
    assert cfg2.n_rep == 11

    bad = tmp_path / "bad.yaml"
    bad.write_text("- just\n- a\n- list\n")
    with pytest.raises(ConfigurationError):
        load_config(str(bad))


def test_presets_resolve():
    names = list_presets()
    assert "group3-usual" in names and "eq5-usual" in names
    cfg = resolve_config("group3-usual")
    assert cfg.variance_config == "group3"
    labels = [e.label or e.kind for e in cfg.estimators]
    assert "MB(gamma=25.6)" in labels
    alt = resolve_config("group3-alternative")
    assert all(e.factor_version == "alternative" for e in alt.estimators)
    with pytest.raises(UnknownConfigError):
        resolve_config("not-a-preset")


def test_resolve_prefers_files(tmp_path):
    f = tmp_path / "group3-usual"
    f.write_text("variance_config: group22\n")
    cfg = resolve_config(str(f))
    assert cfg.variance_config == "group22"


def test_scenario_round_trip():
    cfg = resolve_config("group3-usual")
    again = ScenarioConfig.from_dict(cfg.to_dict())
    assert again.variance_config == cfg.variance_config
    assert len(again.estimators) == len(cfg.estimators)
    assert again.curve.kinds == cfg.curve.kinds
