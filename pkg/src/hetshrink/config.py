"""Scenario configuration: YAML/JSON files and bundled presets.

A scenario names a variance configuration, a prior, a list of estimators,
and the risk-curve layout.  Files are YAML (JSON is a YAML subset, so .json
works too); preset names resolve to files shipped inside the package.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Tuple

import numpy as np
import yaml

from .errors import ConfigurationError, UnknownConfigError
from .model import EstimatorSpec, PriorSpec

_PRIOR_ALIASES = {"zero": PriorSpec.zero, "flat": PriorSpec.flat}


def parse_prior(value):
    """Accept the shorthand forms: null/"zero" (point mass at 0), "flat",
    a scalar (gamma * I), a list of variances, or an explicit mapping.

    Scalars come back as plain floats; they are expanded to a vector once
    the problem dimension is known (`ScenarioConfig.prior_spec`).
    """
    if value is None:
        return PriorSpec.zero()
    if isinstance(value, PriorSpec):
        return value
    if isinstance(value, str):
        if value in _PRIOR_ALIASES:
            return _PRIOR_ALIASES[value]()
        return PriorSpec.from_dict({"kind": value})
    if isinstance(value, dict):
        return PriorSpec.from_dict(value)
    if np.isscalar(value):
        if float(value) == 0.0:
            return PriorSpec.zero()
        return float(value)
    return PriorSpec.explicit(np.asarray(value, dtype=float))


def _normalize_estimator(entry) -> EstimatorSpec:
    if isinstance(entry, EstimatorSpec):
        return entry
    if isinstance(entry, str):
        return EstimatorSpec(kind=entry)
    if not isinstance(entry, dict):
        raise ConfigurationError(f"bad estimator entry: {entry!r}")
    data = dict(entry)
    if "name" in data and "kind" not in data:
        data["kind"] = data.pop("name")
    if "params" in data and "parameters" not in data:
        data["parameters"] = data.pop("params")
    prior = data.get("prior")
    if prior is not None and not isinstance(prior, dict):
        parsed = parse_prior(prior)
        if isinstance(parsed, float):
            # scalar prior on a single estimator: route through parameters
            data.setdefault("parameters", {})
            data["parameters"].setdefault("gamma", parsed)
            data.pop("prior")
        else:
            data["prior"] = parsed.to_dict()
    return EstimatorSpec.from_dict(data)


@dataclass(frozen=True)
class CurveSection:
    kinds: Tuple[str, ...] = ("homoscedastic", "heteroscedastic", "axis:1")
    eta_max: float = 16.0
    eta_steps: int = 17

    def eta_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.eta_max, self.eta_steps)

    def to_dict(self) -> dict:
        return {
            "kinds": list(self.kinds),
            "eta_max": self.eta_max,
            "eta_steps": self.eta_steps,
        }

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> "CurveSection":
        if not data:
            return cls()
        return cls(
            kinds=tuple(data.get("kinds", cls.kinds)),
            eta_max=float(data.get("eta_max", cls.eta_max)),
            eta_steps=int(data.get("eta_steps", cls.eta_steps)),
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """One runnable scenario: problem, prior, estimator bundle, curve grid."""

    name: str
    variance_config: str
    prior: object = None  # PriorSpec or a scalar awaiting the dimension
    estimators: Tuple[EstimatorSpec, ...] = ()
    curve: CurveSection = field(default_factory=CurveSection)
    n_rep: int = 100000
    seed: int = 20260814
    output_path: Optional[str] = None

    def prior_spec(self, p: int) -> PriorSpec:
        if isinstance(self.prior, PriorSpec):
            return self.prior
        if self.prior is None:
            return PriorSpec.zero()
        return PriorSpec.explicit(np.full(p, float(self.prior)))

    def to_dict(self) -> dict:
        prior = self.prior
        if isinstance(prior, PriorSpec):
            prior = prior.to_dict()
        return {
            "name": self.name,
            "variance_config": self.variance_config,
            "prior": prior,
            "estimators": [e.to_dict() for e in self.estimators],
            "curve": self.curve.to_dict(),
            "n_rep": self.n_rep,
            "seed": self.seed,
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if "variance_config" not in data:
            raise ConfigurationError("scenario needs a variance_config name")
        prior = parse_prior(data.get("prior"))
        return cls(
            name=str(data.get("name", data["variance_config"])),
            variance_config=str(data["variance_config"]),
            prior=prior,
            estimators=tuple(
                _normalize_estimator(e) for e in data.get("estimators", [])
            ),
            curve=CurveSection.from_dict(data.get("curve")),
            n_rep=int(data.get("n_rep", cls.n_rep)),
            seed=int(data.get("seed", cls.seed)),
            output_path=data.get("output_path"),
        )


def load_config(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path!r} is not a mapping")
    return ScenarioConfig.from_dict(data)


def list_presets():
    pkg = resources.files("hetshrink") / "presets"
    return sorted(
        entry.name[: -len(".yaml")]
        for entry in pkg.iterdir()
        if entry.name.endswith(".yaml")
    )


def resolve_config(name_or_path: str) -> ScenarioConfig:
    """Load a scenario from a file path or a bundled preset name."""
    if os.path.exists(name_or_path):
        return load_config(name_or_path)
    pkg = resources.files("hetshrink") / "presets" / f"{name_or_path}.yaml"
    if pkg.is_file():
        data = yaml.safe_load(pkg.read_text(encoding="utf-8"))
        return ScenarioConfig.from_dict(data)
    raise UnknownConfigError(
        f"no config file or preset named {name_or_path!r}; presets: "
        + ", ".join(list_presets())
    )
