"""Problem and prior descriptions for mean estimation under known covariance.

The observation model is X ~ N(theta, Sigma) with loss (delta - theta)' Q
(delta - theta).  Canonical form has Sigma = D diagonal and Q = I, described
by the variance vector d alone.  The prior used by Bayes-oriented estimators
is theta ~ N(0, Gamma) with diagonal Gamma; two symbolic tags cover the
degenerate ends: a point mass at zero and the homoscedastic flat limit
Gamma = gamma I with gamma -> infinity (kept symbolic, never a large float).

All types are immutable and round-trip through plain dicts (row-major lists
for matrices) so they can be serialized to JSON.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ConfigurationError, NonPositiveVarianceError
from .validation import (
    as_matrix,
    as_vector,
    check_nonnegative,
    check_positive,
    check_spd,
    readonly,
)

# Symbolic tag for the flat homoscedastic prior limit.
FLAT_PRIOR = "homoscedastic_infinity"

_PRIOR_KINDS = ("explicit", "zero", FLAT_PRIOR)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Observation model: canonical (d) or general (sigma, q)."""

    d: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    q: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.d is not None:
            if self.sigma is not None or self.q is not None:
                raise ValueError("give either d or (sigma, q), not both")
            object.__setattr__(self, "d", readonly(check_positive(self.d, "d")))
        else:
            if self.sigma is None or self.q is None:
                raise ValueError("general problems need both sigma and q")
            sigma = check_spd(self.sigma, "sigma")
            q = check_spd(as_matrix(self.q, "q", sigma.shape[0]), "q")
            object.__setattr__(self, "sigma", readonly(sigma))
            object.__setattr__(self, "q", readonly(q))

    @classmethod
    def canonical(cls, d) -> "ProblemSpec":
        return cls(d=d)

    @classmethod
    def general(cls, sigma, q) -> "ProblemSpec":
        return cls(sigma=sigma, q=q)

    @property
    def mode(self) -> str:
        return "canonical" if self.d is not None else "general"

    @property
    def p(self) -> int:
        return int(self.d.shape[0] if self.d is not None else self.sigma.shape[0])

    def baseline_risk(self) -> float:
        """Risk of the unbiased estimator delta(X) = X: tr(D) or tr(Sigma Q)."""
        if self.d is not None:
            return float(np.sum(self.d))
        return float(np.trace(self.sigma @ self.q))

    def to_dict(self) -> dict:
        if self.mode == "canonical":
            return {"mode": "canonical", "d": self.d.tolist()}
        return {
            "mode": "general",
            "sigma": self.sigma.tolist(),
            "q": self.q.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        if data.get("mode", "canonical") == "canonical" or "d" in data:
            return cls.canonical(data["d"])
        return cls.general(data["sigma"], data["q"])


@dataclass(frozen=True, eq=False)
class PriorSpec:
    """Diagonal normal prior N(0, Gamma), or a symbolic zero / flat tag."""

    kind: str = "zero"
    gamma: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in _PRIOR_KINDS:
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if self.kind == "explicit":
            object.__setattr__(
                self, "gamma", readonly(check_nonnegative(self.gamma, "gamma"))
            )
        elif self.gamma is not None:
            raise ValueError(f"prior kind {self.kind!r} takes no gamma values")

    @classmethod
    def explicit(cls, gamma) -> "PriorSpec":
        return cls(kind="explicit", gamma=gamma)

    @classmethod
    def zero(cls) -> "PriorSpec":
        return cls(kind="zero")

    @classmethod
    def flat(cls) -> "PriorSpec":
        """Homoscedastic gamma*I prior in the gamma -> infinity limit."""
        return cls(kind=FLAT_PRIOR)

    @property
    def is_flat(self) -> bool:
        return self.kind == FLAT_PRIOR

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"kind": "explicit", "gamma": self.gamma.tolist()}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, data: dict) -> "PriorSpec":
        kind = data.get("kind", "zero")
        if kind == "explicit":
            return cls.explicit(data["gamma"])
        return cls(kind=kind)


def effective_gamma(prior, p: int):
    """Resolve a prior to per-coordinate variances.

    Returns a length-p array for explicit and zero priors.  The flat
    homoscedastic-infinity prior has no finite representation and is
    returned as the symbolic tag ``FLAT_PRIOR`` for the direction solver
    to handle.

    ``prior`` may be a PriorSpec, an array of variances, a scalar
    (gamma * I), or None (zero prior).
    """
    if prior is None:
        return np.zeros(p)
    if isinstance(prior, PriorSpec):
        if prior.kind == "zero":
            return np.zeros(p)
        if prior.is_flat:
            return FLAT_PRIOR
        return as_vector(prior.gamma, "gamma", p)
    if isinstance(prior, str):
        if prior == FLAT_PRIOR:
            return FLAT_PRIOR
        raise ValueError(f"unknown prior tag {prior!r}")
    if np.isscalar(prior):
        return check_nonnegative(np.full(p, float(prior)), "gamma")
    return check_nonnegative(as_vector(prior, "gamma", p), "gamma")


@dataclass(frozen=True, eq=False)
class Direction:
    """Shrinkage direction A: diagonal (canonical) or a full matrix."""

    diag: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.diag is None) == (self.matrix is None):
            raise ValueError("give exactly one of diag or matrix")
        if self.diag is not None:
            a = as_vector(self.diag, "diag")
            if np.any(a < 0.0) or not np.all(np.isfinite(a)):
                raise ValueError("canonical directions need a_j >= 0")
            object.__setattr__(self, "diag", readonly(a))
        else:
            object.__setattr__(self, "matrix", readonly(as_matrix(self.matrix, "matrix")))

    @classmethod
    def diagonal(cls, a) -> "Direction":
        return cls(diag=a)

    @classmethod
    def general(cls, matrix) -> "Direction":
        return cls(matrix=matrix)

    @property
    def is_diagonal(self) -> bool:
        return self.diag is not None

    @property
    def p(self) -> int:
        return int(self.diag.shape[0] if self.diag is not None else self.matrix.shape[0])

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.diag) if self.diag is not None else np.array(self.matrix)

    def to_dict(self) -> dict:
        if self.diag is not None:
            return {"diag": self.diag.tolist()}
        return {"matrix": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Direction":
        if "diag" in data:
            return cls.diagonal(data["diag"])
        return cls.general(data["matrix"])


# Estimator kinds for which a doubled shrinkage constant is defined.
ALTERNATIVE_KINDS = frozenset({"B+", "RB", "MB", "A+dag", "A+dag0", "A+dagInf"})


@dataclass(frozen=True, eq=False)
class EstimatorSpec:
    """Registry reference: kind name, scalar parameters, prior, factor version."""

    kind: str
    parameters: dict = field(default_factory=dict)
    prior: Optional[PriorSpec] = None
    factor_version: str = "usual"
    label: Optional[str] = None

    def __post_init__(self):
        if self.factor_version not in ("usual", "alternative"):
            raise ConfigurationError(
                f"factor_version must be 'usual' or 'alternative', got {self.factor_version!r}"
            )
        if self.factor_version == "alternative" and self.kind not in ALTERNATIVE_KINDS:
            raise ConfigurationError(
                f"estimator kind {self.kind!r} has no alternative factor version"
            )
        object.__setattr__(self, "parameters", dict(self.parameters))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "factor_version": self.factor_version}
        if self.parameters:
            out["parameters"] = dict(self.parameters)
        if self.prior is not None:
            out["prior"] = self.prior.to_dict()
        if self.label is not None:
            out["label"] = self.label
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EstimatorSpec":
        prior = data.get("prior")
        return cls(
            kind=data["kind"],
            parameters=dict(data.get("parameters", {})),
            prior=PriorSpec.from_dict(prior) if prior is not None else None,
            factor_version=data.get("factor_version", "usual"),
            label=data.get("label"),
        )


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_problem: mode, dimension, named checks."""

    mode: str
    p: int
    checks: dict
    ok: bool

    def to_dict(self) -> dict:
        return {"mode": self.mode, "p": self.p, "checks": dict(self.checks), "ok": self.ok}


def validate_problem(spec: ProblemSpec) -> ValidationReport:
    """Re-run the structural checks on a problem and report them.

    Construction already rejects invalid inputs; this exposes the same
    checks as data (useful for CLI diagnostics and tests).
    """
    if spec.mode == "canonical":
        checks = {
            "positive_variances": bool(
                np.all(np.isfinite(spec.d)) and np.all(spec.d > 0)
            )
        }
    else:
        checks = {}
        for name, m in (("sigma", spec.sigma), ("q", spec.q)):
            try:
                check_spd(m, name)
                checks[f"{name}_spd"] = True
            except NonPositiveVarianceError:
                checks[f"{name}_spd"] = False
            except Exception:
                checks[f"{name}_spd"] = False
    return ValidationReport(
        mode=spec.mode, p=spec.p, checks=checks, ok=all(checks.values())
    )


GammaLike = Union[np.ndarray, str]
