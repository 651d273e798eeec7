"""Shrinkage estimators for a normal mean with known variances.

Every estimator follows the same small API: hyperparameters (the problem
structure: variances d, prior variances gamma, constants, directions) go to
the constructor; ``fit()`` validates them and precomputes data-independent
state (sort permutations, solved directions, minimax constants); and
``transform(X)`` maps observations to mean estimates, treating each row of a
2-D input as an independent observation vector.  ``estimate(x)`` returns a
single-vector `Estimate` carrying per-coordinate shrink factors (when the
rule is coordinatewise multiplicative) and diagnostic metadata.

`fit` takes no information from data: these rules are closed-form given the
problem structure, and the data-dependent quantities (fitted prior variances,
realized shrink magnitudes) are per-observation and live in ``meta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .bounds import c_star_canonical
from .canonical import (
    c_star_general,
    check_condition_a,
    to_canonical_direction,
)
from .direction import solve_direction
from .errors import (
    ConditionAViolatedError,
    ConfigurationError,
    NegativeCStarError,
)
from .model import (
    FLAT_PRIOR,
    Direction,
    EstimatorSpec,
    PriorSpec,
    effective_gamma,
)
from .validation import as_matrix, as_vector, check_nonnegative, check_positive

# Empirical-Bayes fixed point: stop tolerance, iteration cap, variance floor.
EB_TOL = 1e-4
EB_MAX_ITER = 100
EB_FLOOR_FRACTION = 0.99

# SURE minimization: grid size on t = gamma/(gamma + median(d)), refinement
# tolerance on t, and internal row blocking to cap the grid matrix size.
SURE_GRID = 1024
SURE_T_TOL = 1e-10
_SURE_BLOCK = 4096


def _json_safe(value):
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if np.isfinite(v):
            return v
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    return value


@dataclass(frozen=True, eq=False)
class Estimate:
    """A single-observation estimate with optional per-coordinate factors."""

    value: np.ndarray
    shrink_factors: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"value": self.value.tolist(), "meta": _json_safe(self.meta)}
        if self.shrink_factors is not None:
            out["shrink_factors"] = self.shrink_factors.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Estimate":
        factors = data.get("shrink_factors")
        return cls(
            value=np.asarray(data["value"], dtype=float),
            shrink_factors=None if factors is None else np.asarray(factors, dtype=float),
            meta=dict(data.get("meta", {})),
        )


def _finite_gamma(gamma, p, who):
    g = effective_gamma(gamma, p)
    if isinstance(g, str):
        raise ConfigurationError(
            f"{who} needs finite prior variances; in the flat limit it "
            "degenerates to the unbiased estimator (kind 'X')"
        )
    return check_nonnegative(g, "gamma")


class ShrinkageEstimator(TransformerMixin, BaseEstimator):
    """Base class: fit() precomputes, transform() maps observations rowwise."""

    def fit(self, X=None, y=None):
        """Validate hyperparameters and precompute state.  X is ignored."""
        self._setup()
        self.fitted_ = True
        return self

    def _setup(self):  # pragma: no cover - abstract
        raise NotImplementedError

    def _expected_width(self) -> Optional[int]:
        return getattr(self, "p_", None)

    def _check_ready(self):
        if not getattr(self, "fitted_", False):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted; call fit() first"
            )

    def _coerce(self, X):
        arr = np.asarray(X, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2:
            raise ValueError(f"X must be a vector or matrix, got shape {arr.shape}")
        p = self._expected_width()
        if p is not None and arr.shape[1] != p:
            raise ValueError(f"X has {arr.shape[1]} columns, expected {p}")
        return arr, single

    def transform(self, X) -> np.ndarray:
        """Estimated means, same shape as X ((n, p) rowwise or a single (p,))."""
        self._check_ready()
        arr, single = self._coerce(X)
        values, _, _ = self._shrink(arr)
        return values[0] if single else values

    def estimate(self, x) -> Estimate:
        """Full single-observation result with factors and diagnostics."""
        self._check_ready()
        arr, single = self._coerce(x)
        if not single:
            raise ValueError("estimate() takes a single observation vector")
        values, factors, meta = self._shrink(arr)
        meta1 = {}
        for key, val in meta.items():
            if isinstance(val, np.ndarray) and val.shape == (1,):
                meta1[key] = val[0].item()
            else:
                meta1[key] = val
        return Estimate(
            value=values[0],
            shrink_factors=None if factors is None else factors[0],
            meta=meta1,
        )

    def _shrink(self, X):  # pragma: no cover - abstract
        raise NotImplementedError


class IdentityEstimator(ShrinkageEstimator):
    """The unbiased estimator delta(X) = X."""

    def _setup(self):
        pass

    def _shrink(self, X):
        return X.copy(), np.ones_like(X), {}


class BayesRule(ShrinkageEstimator):
    """Posterior mean under theta ~ N(0, Gamma): factor gamma_j/(d_j+gamma_j)."""

    def __init__(self, d, gamma=None):
        self.d = d
        self.gamma = gamma

    def _setup(self):
        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        g = effective_gamma(self.gamma, self.p_)
        if isinstance(g, str):
            self.factors_ = np.ones(self.p_)  # flat-prior limit: no shrinkage
        else:
            self.factors_ = g / (self.d_ + g)
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        factors = np.broadcast_to(self.factors_, X.shape)
        return X * self.factors_, factors.copy(), {}


class JamesStein(ShrinkageEstimator):
    """Spherical-shrinkage rule (1 - c sigma^2 / ||X||^2) X for equal variances."""

    def __init__(self, sigma2=1.0, c=None, positive_part=False):
        self.sigma2 = sigma2
        self.c = c
        self.positive_part = positive_part

    def _setup(self):
        if not np.isfinite(self.sigma2) or self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")
        self.sigma2_ = float(self.sigma2)
        self.c_ = None if self.c is None else float(self.c)

    def _shrink(self, X):
        p = X.shape[1]
        c = (p - 2.0) if self.c_ is None else self.c_
        nrm = np.einsum("ij,ij->i", X, X)
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(nrm > 0.0, 1.0 - c * self.sigma2_ / nrm, 0.0)
        if self.positive_part:
            factor = np.maximum(factor, 0.0)
        return factor[:, None] * X, np.repeat(factor[:, None], p, axis=1), {"c": c}


class EmpiricalBayes(ShrinkageEstimator):
    """Shrinkage toward zero with a pooled prior variance fitted per observation.

    The common prior variance solves the fixed point
        gamma = sum_j (X_j^2 - d_j)/(d_j+gamma)^2 / sum_j 1/(d_j+gamma)^2
    started from max(0, mean(X_j^2 - d_j)), iterated at most 100 times to an
    absolute tolerance of 1e-4 (iterates floored at -0.99 min_j d_j so the
    denominators stay away from zero).  Non-convergence sets gamma to
    infinity, i.e. no shrinkage.  The applied factor uses the nonnegative
    part of the fitted value:
        delta_j = (1 - ((p-2)/p) d_j/(d_j + max(gamma, 0))) X_j.
    """

    def __init__(self, d):
        self.d = d

    def _setup(self):
        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        self.floor_ = -EB_FLOOR_FRACTION * float(np.min(self.d_))
        self.n_features_in_ = self.p_

    def _fit_gamma(self, X):
        d = self.d_
        x2 = X * X
        gamma = np.maximum(np.mean(x2 - d, axis=1), 0.0)
        converged = np.zeros(X.shape[0], dtype=bool)
        n_iter = 0
        for _ in range(EB_MAX_ITER):
            active = ~converged
            if not np.any(active):
                break
            n_iter += 1
            den = d + gamma[active, None]
            den2 = den * den
            new = np.sum((x2[active] - d) / den2, axis=1) / np.sum(1.0 / den2, axis=1)
            new = np.maximum(new, self.floor_)
            hit = np.abs(new - gamma[active]) <= EB_TOL
            gamma[active] = new
            converged[active] = hit
        gamma = np.where(converged, gamma, np.inf)
        return gamma, converged, n_iter

    def _shrink(self, X):
        gamma, converged, n_iter = self._fit_gamma(X)
        gplus = np.maximum(gamma, 0.0)
        factors = 1.0 - ((self.p_ - 2.0) / self.p_) * self.d_ / (self.d_ + gplus[:, None])
        return factors * X, factors, {
            "gamma_hat": gamma,
            "converged": converged,
            "n_iter": n_iter,
        }


def sure_objective(gamma, x, d) -> float:
    """Risk-estimate objective minimized by `SureShrinkage`:

        X' D (D + gI)^{-1} X + 2 g tr{D (D + gI)^{-1}} - tr(D).

    Note this quadratic term carries D(D+gI)^{-1}, one power less than the
    exact unbiased risk estimate of the same rule family, which would use
    D^2 (D+gI)^{-2}; the two differ by sum_j g d_j X_j^2/(d_j+g)^2.  The
    estimator intentionally minimizes this published variant.  At gamma =
    +inf the value is tr(D).
    """
    d = check_positive(d, "d")
    x = as_vector(x, "x", d.shape[0])
    if np.isinf(gamma):
        return float(np.sum(d))
    w = d / (d + gamma)
    return float(np.sum(w * x * x) + 2.0 * gamma * np.sum(w) - np.sum(d))


class SureShrinkage(ShrinkageEstimator):
    """Bayes-rule family with the common prior variance picked by minimizing
    `sure_objective` over gamma in [0, +inf].

    Minimization is deterministic: the objective is evaluated on a 1024-point
    grid in t = gamma/(gamma + median(d)) over [0, 1), refined by golden
    section to |dt| < 1e-10, and compared against the t = 1 endpoint
    (gamma = +inf, objective tr(D), estimator X).
    """

    def __init__(self, d):
        self.d = d

    def _setup(self):
        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        self.trace_ = float(np.sum(self.d_))
        self.scale_ = float(np.median(self.d_))
        t = np.linspace(0.0, 1.0, SURE_GRID, endpoint=False)
        self.t_grid_ = t
        gam = self._gamma_of_t(t)
        self.weight_grid_ = self.d_[None, :] / (self.d_[None, :] + gam[:, None])
        self.const_grid_ = 2.0 * gam * np.sum(self.weight_grid_, axis=1) - self.trace_
        self.n_features_in_ = self.p_

    def _gamma_of_t(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            gam = np.where(t >= 1.0, np.inf, t * self.scale_ / (1.0 - t))
        return gam

    def _objective(self, x2, t):
        """Objective at per-row t values; x2 is X**2 rowwise."""
        gam = self._gamma_of_t(t)
        finite = np.isfinite(gam)
        out = np.full(t.shape, self.trace_)
        if np.any(finite):
            g = gam[finite][:, None]
            w = self.d_[None, :] / (self.d_[None, :] + g)
            out[finite] = (
                np.sum(w * x2[finite], axis=1)
                + 2.0 * gam[finite] * np.sum(w, axis=1)
                - self.trace_
            )
        return out

    def _minimize_block(self, x2):
        n = x2.shape[0]
        grid_vals = x2 @ self.weight_grid_.T + self.const_grid_[None, :]
        k = np.argmin(grid_vals, axis=1)
        step = self.t_grid_[1]
        lo = np.maximum(self.t_grid_[k] - step, 0.0)
        hi = np.minimum(self.t_grid_[k] + step, 1.0)

        invphi = (np.sqrt(5.0) - 1.0) / 2.0
        invphi2 = 1.0 - invphi
        x1 = lo + invphi2 * (hi - lo)
        x2t = lo + invphi * (hi - lo)
        f1 = self._objective(x2, x1)
        f2 = self._objective(x2, x2t)
        n_steps = int(np.ceil(np.log(SURE_T_TOL / (2.0 * step)) / np.log(invphi))) + 1
        for _ in range(n_steps):
            take = f1 < f2
            hi = np.where(take, x2t, hi)
            lo = np.where(take, lo, x1)
            width = hi - lo
            x1n = lo + invphi2 * width
            x2n = lo + invphi * width
            # the probe that does not coincide with a kept point is the only
            # fresh evaluation; the other reuses the surviving value
            xe = np.where(take, x1n, x2n)
            fe = self._objective(x2, xe)
            f1n = np.where(take, fe, f2)
            f2n = np.where(take, f1, fe)
            x1, x2t, f1, f2 = x1n, x2n, f1n, f2n

        t_best = (lo + hi) / 2.0
        f_best = self._objective(x2, t_best)
        # keep the grid point if refinement did not improve on it
        grid_best = grid_vals[np.arange(n), k]
        worse = f_best > grid_best
        t_best = np.where(worse, self.t_grid_[k], t_best)
        f_best = np.minimum(f_best, grid_best)
        return t_best, f_best

    def _shrink(self, X):
        n = X.shape[0]
        gamma = np.empty(n)
        sure = np.empty(n)
        for start in range(0, n, _SURE_BLOCK):
            stop = min(start + _SURE_BLOCK, n)
            x2 = X[start:stop] ** 2
            t_best, f_best = self._minimize_block(x2)
            g = self._gamma_of_t(t_best)
            flat_better = self.trace_ < f_best
            gamma[start:stop] = np.where(flat_better, np.inf, g)
            sure[start:stop] = np.minimum(f_best, self.trace_)
        factors = 1.0 - self.d_ / (self.d_ + gamma[:, None])
        return factors * X, factors, {"gamma_tilde": gamma, "sure": sure}


class SphericalShrinkage(ShrinkageEstimator):
    """delta = (1 - m/||X||^2) X with m a constant or a function of ||X||^2."""

    def __init__(self, d, c=None):
        self.d = d
        self.c = c

    def _setup(self):
        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        if self.c is None:
            raise ValueError("spherical shrinkage needs c (a constant or callable)")
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        t = np.einsum("ij,ij->i", X, X)
        m = _magnitude_values(self.c, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(t > 0.0, 1.0 - m / t, 0.0)
        return factor[:, None] * X, np.repeat(factor[:, None], X.shape[1], axis=1), {
            "magnitude": m
        }


def spherical_minimax_range(d):
    """Closed interval [0, 2(tr(D) - 2 lmax(D))] of minimax constants for
    `SphericalShrinkage`, or None when the upper end is negative (no
    spherical rule dominates X)."""
    d = check_positive(d, "d")
    hi = 2.0 * float(np.sum(d) - 2.0 * np.max(d))
    if hi < 0.0:
        return None
    return (0.0, hi)


class InverseVarianceShrinkage(ShrinkageEstimator):
    """Shrinkage proportional to 1/d_j: delta_j = (1 - c/(d_j X'D^{-2}X)) X_j.

    Default c = p - 2 (doubled by alternative=True); positive_part clips each
    coordinate factor at zero.
    """

    def __init__(self, d, c=None, positive_part=False, alternative=False):
        self.d = d
        self.c = c
        self.positive_part = positive_part
        self.alternative = alternative

    def _setup(self):
        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        if self.c is not None:
            self.c_ = float(self.c)
        else:
            self.c_ = (self.p_ - 2.0) * (2.0 if self.alternative else 1.0)
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        inv_d = 1.0 / self.d_
        t = (X * X) @ (inv_d * inv_d)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(t > 0.0, self.c_ / t, 0.0)
        factors = 1.0 - lam[:, None] * inv_d[None, :]
        factors[t == 0.0] = 0.0
        if self.positive_part:
            factors = np.maximum(factors, 0.0)
        return factors * X, factors, {"c": self.c_}


class RobustBayes(ShrinkageEstimator):
    """Bayes-rule direction with a truncated adaptive magnitude:

        delta = [I - min{1, f / (X'(D+Gamma)^{-1}X)} D (D+Gamma)^{-1}] X,

    f = p - 2 (doubled by alternative=True).  With Gamma = 0 this is the
    positive-part spherical rule in the D^{-1} metric.
    """

    def __init__(self, d, gamma=None, alternative=False):
        self.d = d
        self.gamma = gamma
        self.alternative = alternative

    def _setup(self):
        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        self.gamma_ = _finite_gamma(self.gamma, self.p_, "RobustBayes")
        self.f_ = (self.p_ - 2.0) * (2.0 if self.alternative else 1.0)
        self.bayes_slope_ = self.d_ / (self.d_ + self.gamma_)
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        w = 1.0 / (self.d_ + self.gamma_)
        t = (X * X) @ w
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(t > 0.0, np.minimum(1.0, self.f_ / t), 1.0)
        factors = 1.0 - s[:, None] * self.bayes_slope_[None, :]
        return factors * X, factors, {"f": self.f_, "shrink": s}


class MinimaxBayes(ShrinkageEstimator):
    """Telescoping minimax shrinkage ordered by Bayes importance.

    With coordinates sorted by d*_j = d_j^2/(d_j+gamma_j) nonincreasing and
    d*_{p+1} = 0, the rule is

        delta_j = X_j - [ (1/d*_j) sum_{k>=j} (d*_k - d*_{k+1})
                          min{1, (k-2)_+ / sum_{l<=k} X_l^2/(d_l+gamma_l)} ]
                  (d_j/(d_j+gamma_j)) X_j.

    variant="alternative" doubles (k-2)_+ inside the truncation;
    variant="simplified" drops the min{1, .} truncation entirely.
    """

    def __init__(self, d, gamma=None, variant="standard"):
        self.d = d
        self.gamma = gamma
        self.variant = variant

    def _setup(self):
        if self.variant not in ("standard", "alternative", "simplified"):
            raise ValueError(f"unknown variant {self.variant!r}")
        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        self.gamma_ = _finite_gamma(self.gamma, self.p_, "MinimaxBayes")
        ds = self.d_ * self.d_ / (self.d_ + self.gamma_)
        self.perm_ = np.argsort(-ds, kind="stable")
        self.ds_sorted_ = ds[self.perm_]
        self.w_sorted_ = (1.0 / (self.d_ + self.gamma_))[self.perm_]
        self.slope_sorted_ = (self.d_ / (self.d_ + self.gamma_))[self.perm_]
        k = np.arange(1, self.p_ + 1)
        mult = 2.0 if self.variant == "alternative" else 1.0
        self.kfac_ = mult * np.maximum(k - 2.0, 0.0)
        self.delta_ds_ = self.ds_sorted_ - np.append(self.ds_sorted_[1:], 0.0)
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        xs = X[:, self.perm_]
        den = np.cumsum(xs * xs * self.w_sorted_[None, :], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = self.kfac_[None, :] / den
        ratio[:, self.kfac_ == 0.0] = 0.0
        ratio[den == 0.0] = 0.0  # whole prefix is zero; those coords get X_j = 0 anyway
        if self.variant != "simplified":
            ratio = np.minimum(ratio, 1.0)
        contrib = self.delta_ds_[None, :] * ratio
        suffix = np.flip(np.cumsum(np.flip(contrib, axis=1), axis=1), axis=1)
        s = suffix / self.ds_sorted_[None, :]
        factors_sorted = 1.0 - s * self.slope_sorted_[None, :]
        factors = np.empty_like(factors_sorted)
        factors[:, self.perm_] = factors_sorted
        return factors * X, factors, {"variant": self.variant}


def _magnitude_values(magnitude, t):
    """Evaluate a constant or callable magnitude on quadratic-form values t."""
    if callable(magnitude):
        vals = np.asarray(magnitude(t), dtype=float)
        if vals.shape != t.shape:
            vals = np.asarray([float(magnitude(v)) for v in t])
        return vals
    return np.full_like(t, float(magnitude))


class DirectionalShrinkage(ShrinkageEstimator):
    """Linear shrinkage along a direction A: delta = X - (m/(X'A'QAX)) A X.

    Canonical problems pass variances d and a diagonal direction (vector a);
    general problems pass (sigma, q) and a direction matrix, which must make
    A Sigma nonnegative definite.  The magnitude m is a constant, a callable
    of the quadratic form t = X'A'QAX, or the string "auto" for the minimax
    constant c*(Sigma, Q, A) (which must be nonnegative).
    """

    def __init__(self, a, d=None, sigma=None, q=None, magnitude="auto"):
        self.a = a
        self.d = d
        self.sigma = sigma
        self.q = q
        self.magnitude = magnitude

    def _resolve_direction(self):
        a = self.a
        if isinstance(a, Direction):
            return a
        arr = np.asarray(a, dtype=float)
        return Direction.diagonal(arr) if arr.ndim == 1 else Direction.general(arr)

    def _setup(self):
        direction = self._resolve_direction()
        if self.d is not None:
            self.d_ = check_positive(self.d, "d")
            self.p_ = self.d_.shape[0]
            if direction.is_diagonal:
                self.a_diag_ = as_vector(direction.diag, "a", self.p_)
                self.c_star_ = c_star_canonical(self.d_, self.a_diag_)
                self.a_matrix_ = None
            else:
                self.a_diag_ = None
                self.a_matrix_ = as_matrix(direction.matrix, "a", self.p_)
                sigma = np.diag(self.d_)
                if not check_condition_a(sigma, self.a_matrix_):
                    raise ConditionAViolatedError("A D is not nonnegative definite")
                self.gram_ = self.a_matrix_.T @ self.a_matrix_
                self.c_star_ = c_star_general(sigma, np.eye(self.p_), self.a_matrix_)
        else:
            if self.sigma is None or self.q is None:
                raise ValueError("give either d or both sigma and q")
            sigma = as_matrix(self.sigma, "sigma")
            q = as_matrix(self.q, "q", sigma.shape[0])
            self.p_ = sigma.shape[0]
            self.a_diag_ = None
            self.a_matrix_ = direction.as_matrix()
            as_matrix(self.a_matrix_, "a", self.p_)
            if not check_condition_a(sigma, self.a_matrix_):
                raise ConditionAViolatedError("A Sigma is not nonnegative definite")
            self.gram_ = self.a_matrix_.T @ q @ self.a_matrix_
            self.c_star_ = c_star_general(sigma, q, self.a_matrix_)

        if isinstance(self.magnitude, str):
            if self.magnitude != "auto":
                raise ValueError(f"unknown magnitude {self.magnitude!r}")
            if self.c_star_ < 0.0:
                raise NegativeCStarError(
                    f"c* = {self.c_star_:.6g} < 0: no minimax constant exists"
                )
            self.m_ = float(self.c_star_)
        elif callable(self.magnitude):
            self.m_ = self.magnitude
        else:
            self.m_ = float(self.magnitude)
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        if self.a_diag_ is not None:
            ax = X * self.a_diag_[None, :]
            t = (X * X) @ (self.a_diag_ * self.a_diag_)
        else:
            ax = X @ self.a_matrix_.T
            t = np.einsum("ij,jk,ik->i", X, self.gram_, X)
        m = _magnitude_values(self.m_, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(t > 0.0, m / t, 0.0)
        values = X - lam[:, None] * ax
        if self.a_diag_ is not None:
            factors = 1.0 - lam[:, None] * self.a_diag_[None, :]
        else:
            factors = None
        return values, factors, {"lambda": lam, "c_star": self.c_star_}


class PositivePartShrinkage(ShrinkageEstimator):
    """Coordinatewise-clipped directional shrinkage.

    Canonical: delta_j = {1 - f a_j / (X'A'AX)}_+ X_j with f = c*(D, A)
    (doubled by alternative=True); requires c* >= 0.  General problems are
    reduced to canonical coordinates through a factorization B (requires the
    joint-diagonalizability identities), clipped there, and mapped back:
    delta = B^{-1} diag[{1 - f a*_j/(X'A'QAX)}_+] B X.
    """

    def __init__(self, a, d=None, sigma=None, q=None, alternative=False):
        self.a = a
        self.d = d
        self.sigma = sigma
        self.q = q
        self.alternative = alternative

    def _setup(self):
        a = self.a
        if isinstance(a, Direction):
            a = a.diag if a.is_diagonal else a.matrix
        arr = np.asarray(a, dtype=float)
        if self.d is not None:
            self.d_ = check_positive(self.d, "d")
            self.p_ = self.d_.shape[0]
            if arr.ndim != 1:
                raise ValueError("canonical positive-part needs a diagonal direction")
            self.a_star_ = as_vector(arr, "a", self.p_)
            self.b_ = None
            self.c_star_ = c_star_canonical(self.d_, self.a_star_)
        else:
            if self.sigma is None or self.q is None:
                raise ValueError("give either d or both sigma and q")
            sigma = as_matrix(self.sigma, "sigma")
            q = as_matrix(self.q, "q", sigma.shape[0])
            self.p_ = sigma.shape[0]
            if arr.ndim == 1:
                arr = np.diag(arr)
            b, dcan, a_star = to_canonical_direction(sigma, q, arr)
            self.b_ = b
            self.a_star_ = a_star
            self.c_star_ = c_star_general(sigma, q, arr)
        if self.c_star_ < 0.0:
            raise NegativeCStarError(
                f"c* = {self.c_star_:.6g} < 0: no minimax constant exists"
            )
        self.f_ = (2.0 if self.alternative else 1.0) * float(self.c_star_)
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        if self.b_ is None:
            y = X
        else:
            y = X @ self.b_.T
        t = (y * y) @ (self.a_star_ * self.a_star_)
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = 1.0 - self.f_ * self.a_star_[None, :] / t[:, None]
        raw[t == 0.0] = 0.0
        fac = np.maximum(raw, 0.0)
        if self.b_ is None:
            return fac * X, fac, {"c_star": self.c_star_, "f": self.f_}
        values = np.linalg.solve(self.b_, (fac * y).T).T
        return values, None, {"c_star": self.c_star_, "f": self.f_}


class BlockShrinkage(ShrinkageEstimator):
    """Split coordinates (sorted by Bayes importance) into two blocks at the
    maximizer of the block criterion L_k and apply inverse-variance shrinkage
    with constant (block size - 2) inside each block; blocks of dimension
    <= 2 are passed through unchanged."""

    def __init__(self, d, gamma=None):
        self.d = d
        self.gamma = gamma

    def _setup(self):
        from .bounds import block_l_sequence

        self.d_ = check_positive(self.d, "d")
        self.p_ = self.d_.shape[0]
        self.gamma_ = _finite_gamma(self.gamma, self.p_, "BlockShrinkage")
        ds = self.d_ * self.d_ / (self.d_ + self.gamma_)
        self.perm_ = np.argsort(-ds, kind="stable")
        self.l_seq_ = block_l_sequence(self.d_[self.perm_], self.gamma_[self.perm_])
        self.tau_ = int(np.argmax(self.l_seq_)) + 1  # smallest maximizer
        self.blocks_ = (self.perm_[: self.tau_], self.perm_[self.tau_ :])
        self.n_features_in_ = self.p_

    def _shrink(self, X):
        factors = np.ones_like(X)
        for idx in self.blocks_:
            m = idx.shape[0]
            if m <= 2:
                continue
            sub = X[:, idx]
            inv_d = 1.0 / self.d_[idx]
            t = (sub * sub) @ (inv_d * inv_d)
            with np.errstate(divide="ignore", invalid="ignore"):
                lam = np.where(t > 0.0, (m - 2.0) / t, 0.0)
            f = 1.0 - lam[:, None] * inv_d[None, :]
            f[t == 0.0] = 0.0
            factors[:, idx] = f
        return factors * X, factors, {"tau": self.tau_, "l_seq": self.l_seq_}


# ---------------------------------------------------------------------------
# Registry


def _prior_for(spec: EstimatorSpec, default_prior):
    if "gamma" in spec.parameters:
        return spec.parameters["gamma"]
    if spec.prior is not None:
        return spec.prior
    return default_prior


def _build_js(spec, d, prior, positive_part):
    d = check_positive(d, "d")
    if np.max(d) - np.min(d) > 1e-12 * max(1.0, float(np.max(d))):
        raise ConfigurationError("JS needs equal variances; use B/B+ or S instead")
    return JamesStein(
        sigma2=float(d[0]), c=spec.parameters.get("c"), positive_part=positive_part
    )


def _registry():
    def bayes(spec, d, prior):
        return BayesRule(d, _prior_for(spec, prior))

    def eb(spec, d, prior):
        return EmpiricalBayes(d)

    def xkb(spec, d, prior):
        return SureShrinkage(d)

    def spherical(spec, d, prior):
        c = spec.parameters.get("c")
        if c is None:
            c = max(0.0, c_star_canonical(d, np.ones(len(np.asarray(d)))))
        return SphericalShrinkage(d, c=c)

    def berger(spec, d, prior, positive_part=False):
        return InverseVarianceShrinkage(
            d,
            c=spec.parameters.get("c"),
            positive_part=positive_part,
            alternative=spec.factor_version == "alternative",
        )

    def rb(spec, d, prior):
        return RobustBayes(
            d, _prior_for(spec, prior), alternative=spec.factor_version == "alternative"
        )

    def mb(spec, d, prior):
        variant = "alternative" if spec.factor_version == "alternative" else "standard"
        return MinimaxBayes(d, _prior_for(spec, prior), variant=variant)

    def mb2(spec, d, prior):
        return MinimaxBayes(d, _prior_for(spec, prior), variant="simplified")

    def adag(spec, d, prior, positive_part=False, fixed_prior=None):
        use = fixed_prior if fixed_prior is not None else _prior_for(spec, prior)
        sol = solve_direction(d, use)
        if positive_part:
            return PositivePartShrinkage(
                sol.a_dag, d=d, alternative=spec.factor_version == "alternative"
            )
        return DirectionalShrinkage(sol.a_dag, d=d, magnitude="auto")

    return {
        "X": lambda spec, d, prior: IdentityEstimator(),
        "Bayes": bayes,
        "JS": lambda spec, d, prior: _build_js(spec, d, prior, False),
        "JS+": lambda spec, d, prior: _build_js(spec, d, prior, True),
        "EB": eb,
        "XKB": xkb,
        "S": spherical,
        "B": lambda spec, d, prior: berger(spec, d, prior, False),
        "B+": lambda spec, d, prior: berger(spec, d, prior, True),
        "RB": rb,
        "MB": mb,
        "MB2": mb2,
        "Adag": lambda spec, d, prior: adag(spec, d, prior, False),
        "A+dag": lambda spec, d, prior: adag(spec, d, prior, True),
        "A+dag0": lambda spec, d, prior: adag(
            spec, d, prior, True, fixed_prior=PriorSpec.zero()
        ),
        "A+dagInf": lambda spec, d, prior: adag(
            spec, d, prior, True, fixed_prior=PriorSpec.flat()
        ),
        "block": lambda spec, d, prior: BlockShrinkage(d, _prior_for(spec, prior)),
    }


REGISTRY = _registry()


def available_estimators():
    return sorted(REGISTRY)


def _default_label(spec: EstimatorSpec) -> str:
    label = spec.kind
    if spec.factor_version == "alternative":
        label += "-alt"
    if "gamma" in spec.parameters:
        g = spec.parameters["gamma"]
        label += f"[gamma={g}]" if np.isscalar(g) else "[gamma=...]"
    return label


def build_estimator(spec: Union[EstimatorSpec, str, dict], d, prior=None):
    """Construct and fit a registry estimator.

    Parameters
    ----------
    spec : EstimatorSpec, registry name, or config dict
    d : array-like
        Canonical variances.
    prior : PriorSpec, array-like or None
        Scenario prior; individual specs may override it via spec.prior or
        parameters["gamma"].

    Returns
    -------
    (label, estimator) with the estimator already fitted.
    """
    if isinstance(spec, str):
        spec = EstimatorSpec(kind=spec)
    elif isinstance(spec, dict):
        data = dict(spec)
        if "name" in data and "kind" not in data:
            data["kind"] = data.pop("name")
        if "params" in data and "parameters" not in data:
            data["parameters"] = data.pop("params")
        spec = EstimatorSpec.from_dict(data)
    if spec.kind not in REGISTRY:
        raise ConfigurationError(
            f"unknown estimator {spec.kind!r}; known: {', '.join(available_estimators())}"
        )
    est = REGISTRY[spec.kind](spec, d, prior if prior is not None else PriorSpec.zero())
    label = spec.label or _default_label(spec)
    return label, est.fit()
