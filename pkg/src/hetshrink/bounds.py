"""Risk bounds and exact-risk formulas for the shrinkage estimators.

All functions work in canonical form: variances d, diagonal prior variances
gamma (arrays; the flat symbolic prior has no finite Bayes risk and is
rejected).  Sorting by Bayes importance d*_j = d_j^2/(d_j+gamma_j)
nonincreasing is done internally where a formula needs it; d*_j below always
refers to the j-th largest importance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .direction import solve_direction
from .errors import (
    AlphaBelowFloorError,
    DimensionTooSmallError,
    NegativeCStarError,
    ShrinkageError,
)
from .model import FLAT_PRIOR, effective_gamma
from .validation import as_vector, check_positive


@dataclass(frozen=True)
class BoundReport:
    """A named bound value with the assumptions under which it applies."""

    name: str
    value: float
    assumptions: tuple = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": float(self.value),
            "assumptions": list(self.assumptions),
        }


def c_star_canonical(d, a) -> float:
    """c*(D, A) = tr(DA) - 2 max_j d_j a_j for diagonal A = diag(a), a >= 0."""
    d = check_positive(d, "d")
    a = as_vector(a, "a", d.shape[0])
    if np.any(a < 0.0) or not np.all(np.isfinite(a)):
        raise ValueError("canonical directions need a_j >= 0")
    da = d * a
    return float(np.sum(da) - 2.0 * np.max(da))


def _resolve_gamma(d, gamma):
    g = effective_gamma(gamma, d.shape[0])
    if isinstance(g, str):
        raise ValueError(
            "bound formulas need finite prior variances, not the flat tag"
        )
    return g


def _sorted_importance(d, gamma):
    d = check_positive(d, "d")
    g = _resolve_gamma(d, gamma)
    ds = d * d / (d + g)
    order = np.argsort(-ds, kind="stable")
    return d, g, ds[order]


def bayes_upper_bound(d, gamma, a) -> BoundReport:
    """Bayes risk bound tr(D) - (p/(p-2)) c*(D,A)^2 / sum_j (d_j+gamma_j) a_j^2.

    Valid for the scaled estimator built on direction a whenever
    c*(D, A) >= 0; raises NegativeCStarError otherwise.
    """
    d = check_positive(d, "d")
    p = d.shape[0]
    if p < 3:
        raise DimensionTooSmallError("bayes_upper_bound needs p >= 3")
    g = _resolve_gamma(d, gamma)
    a = as_vector(a, "a", p)
    c = c_star_canonical(d, a)
    if c < 0.0:
        raise NegativeCStarError(f"c*(D, A) = {c:.6g} < 0")
    denom = float(np.sum((d + g) * a * a))
    value = float(np.sum(d)) - (p / (p - 2.0)) * c * c / denom
    return BoundReport(
        name="bayes_upper_bound",
        value=value,
        assumptions=("theta ~ N(0, Gamma)", f"c* = {c!r}"),
    )


def worst_case_bound(d, gamma, a) -> BoundReport:
    """Pointwise risk bound tr(D) - c*(D,A)^2 / sum_j (d_j+gamma_j) a_j^2.

    Holds at every theta in the hyper-rectangle |theta_j| <= sqrt(gamma_j);
    requires c*(D, A) > 0.
    """
    d = check_positive(d, "d")
    g = _resolve_gamma(d, gamma)
    a = as_vector(a, "a", d.shape[0])
    c = c_star_canonical(d, a)
    if c <= 0.0:
        raise NegativeCStarError(f"c*(D, A) = {c:.6g} <= 0")
    denom = float(np.sum((d + g) * a * a))
    value = float(np.sum(d)) - c * c / denom
    return BoundReport(
        name="worst_case_bound",
        value=value,
        assumptions=("|theta_j| <= sqrt(gamma_j) for all j", f"c* = {c!r}"),
    )


def theorem3_bounds(d, gamma) -> dict:
    """Interpretable Bayes-risk bounds for the solved direction.

    Returns {"tight": BoundReport, "loose": BoundReport}; the branch follows
    the solver's cutoff (nu = 3 versus nu >= 4).
    """
    d, g, ds = _sorted_importance(d, gamma)
    p = d.shape[0]
    sol = solve_direction(d, g)
    nu = sol.nu
    base = float(np.sum(d)) - float(np.sum(ds[2:]))
    if nu == 3:
        tight = base + (
            ds[2] - (2.0 / (p - 2.0)) * float(np.sum(ds[3:])) - (p / (p - 2.0)) * ds[2] / 3.0
        )
        loose = base + (2.0 / 3.0) * ds[2]
        branch = "nu = 3"
    else:
        tight = base + (
            ds[2]
            + ds[3]
            - (2.0 / (p - 2.0)) * float(np.sum(ds[4:]))
            - (4.0 * p / (p - 2.0)) * ds[nu - 1] / nu
        )
        loose = base + ds[2] + ds[3]
        branch = "nu >= 4"
    assumptions = ("theta ~ N(0, Gamma)", "direction a_dag", branch)
    return {
        "tight": BoundReport("theorem3_tight", float(tight), assumptions),
        "loose": BoundReport("theorem3_loose", float(loose), assumptions),
    }


def theorem4_bounds(d, gamma) -> dict:
    """Worst-case bounds over the hyper-rectangle for the solved direction.

    Same branch structure as theorem3_bounds but without the p/(p-2)
    Bayes-averaging factor; for nu = 3 the two reports coincide.
    """
    d, g, ds = _sorted_importance(d, gamma)
    sol = solve_direction(d, g)
    nu = sol.nu
    base = float(np.sum(d)) - float(np.sum(ds[2:]))
    if nu == 3:
        tight = loose = base + (2.0 / 3.0) * ds[2]
        branch = "nu = 3"
    else:
        loose = base + ds[2] + ds[3]
        tight = loose - 4.0 * ds[nu - 1] / nu
        branch = "nu >= 4"
    assumptions = ("|theta_j| <= sqrt(gamma_j) for all j", "direction a_dag", branch)
    return {
        "tight": BoundReport("theorem4_tight", float(tight), assumptions),
        "loose": BoundReport("theorem4_loose", float(loose), assumptions),
    }


def bayes_risk_of_bayes_rule(d, gamma) -> float:
    """Exact Bayes risk of the Bayes rule: tr(D) - sum_j d*_j."""
    d = check_positive(d, "d")
    g = _resolve_gamma(d, gamma)
    return float(np.sum(d) - np.sum(d * d / (d + g)))


def bayes_proximity_bound(d, gamma) -> BoundReport:
    """Bayes risk of the solved-direction estimator is within the four largest
    importances of the Bayes rule's risk: R(Bayes) + d*_1 + d*_2 + d*_3 + d*_4."""
    d, g, ds = _sorted_importance(d, gamma)
    if d.shape[0] < 4:
        raise DimensionTooSmallError("bayes_proximity_bound needs p >= 4")
    value = float(np.sum(d)) - float(np.sum(ds)) + float(np.sum(ds[:4]))
    return BoundReport(
        name="bayes_proximity_bound",
        value=value,
        assumptions=("theta ~ N(0, Gamma)", "direction a_dag"),
    )


def corollary4_bound(d, gamma, alpha) -> BoundReport:
    """Bayes-risk bound under the inflated prior Gamma_alpha = alpha (D+Gamma) - D.

    Requires alpha >= alpha_0 = max_j d_j/(d_j+gamma_j) so Gamma_alpha is a
    valid (nonnegative) prior.  The bound is
    tr(D) - (1/alpha) sum_j d*_j + (1/alpha)(d*_1 + d*_2 + d*_3 + d*_4),
    top importances taken under the original Gamma.
    """
    d, g, ds = _sorted_importance(d, gamma)
    alpha = float(alpha)
    alpha0 = float(np.max(d / (d + g)))
    if alpha < alpha0 * (1.0 - 1e-12):
        raise AlphaBelowFloorError(f"alpha = {alpha:.6g} below floor {alpha0:.6g}")
    top = float(np.sum(ds[: min(4, d.shape[0])]))
    value = float(np.sum(d)) - float(np.sum(ds)) / alpha + top / alpha
    return BoundReport(
        name="corollary4_bound",
        value=value,
        assumptions=(
            "theta ~ N(0, alpha (D + Gamma) - D)",
            "direction a_dag solved under Gamma",
            f"alpha = {alpha!r}",
        ),
    )


def mb2_bayes_risk(d, gamma) -> float:
    """Exact Bayes risk of the simplified telescoping estimator.

    tr(D) - sum_{j>=3} d*_j
          - 2 sum_{j>=3} (d*_j / j) (1 - (d*_j/(j-1)) sum_{k<j} 1/d*_k),
    indices sorted by d* nonincreasing.
    """
    d, g, ds = _sorted_importance(d, gamma)
    p = d.shape[0]
    if p < 3:
        raise DimensionTooSmallError("mb2_bayes_risk needs p >= 3")
    j = np.arange(3, p + 1)
    prefix_inv = np.cumsum(1.0 / ds)
    # sum_{k<j} 1/d*_k for j = 3..p is prefix_inv[j-2] zero-based.
    inner = 1.0 - (ds[2:] / (j - 1.0)) * prefix_inv[1 : p - 1]
    correction = 2.0 * float(np.sum((ds[2:] / j) * inner))
    return float(np.sum(d)) - float(np.sum(ds[2:])) - correction


def block_l_sequence(d, gamma):
    """(L_1, ..., L_p) for inputs sorted by d* nonincreasing.

    L_k = (k-2) / ((1/k) sum_{j<=k} w_j) + (p-k-2) / ((1/(p-k)) sum_{j>k} w_j)
    with w_j = (d_j+gamma_j)/d_j^2 = 1/d*_j; the first term is zero for
    k <= 2 and the second for k >= p-2.  Each L_k is dominated by the
    Cauchy-Schwarz envelope {k/(k-2)} M_k (verified internally for k >= 3).
    """
    d = check_positive(d, "d")
    g = _resolve_gamma(d, gamma)
    p = d.shape[0]
    if p < 3:
        raise DimensionTooSmallError("block_l_sequence needs p >= 3")
    ds = d * d / (d + g)
    w = 1.0 / ds
    prefix = np.cumsum(w)
    total = prefix[-1]
    out = np.zeros(p)
    for k in range(1, p + 1):
        first = 0.0 if k <= 2 else (k - 2.0) / (prefix[k - 1] / k)
        second = 0.0
        if k <= p - 3:
            second = (p - k - 2.0) / ((total - prefix[k - 1]) / (p - k))
        out[k - 1] = first + second

    # Cauchy-Schwarz sanity: {k/(k-2)} M_k >= L_k for k >= 3.
    suffix_ds = np.sum(ds) - np.cumsum(ds)
    for k in range(3, p + 1):
        m_k = (k - 2.0) ** 2 / prefix[k - 1] + suffix_ds[k - 1]
        envelope = (k / (k - 2.0)) * m_k
        if out[k - 1] > envelope * (1.0 + 1e-12) + 1e-12:
            raise ShrinkageError(
                f"L_{k} = {out[k - 1]!r} exceeds its envelope {envelope!r}"
            )
    return out


def inverse_moment_lower_bound(d, gamma, a) -> float:
    """Jensen lower bound (p/(p-2)) / sum_j (d_j+gamma_j) a_j^2 for the
    marginal inverse moment E[1 / (X' A'A X)] under theta ~ N(0, Gamma)."""
    d = check_positive(d, "d")
    p = d.shape[0]
    if p < 3:
        raise DimensionTooSmallError("inverse_moment_lower_bound needs p >= 3")
    g = _resolve_gamma(d, gamma)
    a = as_vector(a, "a", p)
    return (p / (p - 2.0)) / float(np.sum((d + g) * a * a))
