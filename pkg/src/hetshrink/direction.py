"""Closed-form solver for the optimal diagonal shrinkage direction.

Given canonical variances d and a diagonal prior Gamma, the Bayes importance
of coordinate j is d*_j = d_j^2 / (d_j + gamma_j): how much risk reduction a
correctly tuned linear shrinker can extract there.  The optimal direction
concentrates shrinkage on the nu most important coordinates (the cutoff nu is
where the averaged criterion overtakes the next importance value) and falls
back to the Bayes-rule slope d_j/(d_j + gamma_j) on the rest:

    a_j = (nu - 2) / (d_j * sum_{k<=nu} 1/d*_k)   for the top nu coordinates,
    a_j = d*_j / d_j                              below the cutoff,

indices sorted by d* nonincreasing.  The attained minimax constant is

    M_k = (k - 2)^2 / sum_{j<=k} 1/d*_j + sum_{j>k} d*_j

evaluated at k = nu, and M_3 >= M_4 >= ... >= M_p with equality exactly at
the cutoff-criterion boundary, so the smallest feasible k is the argmax.

Everything is driven by d* alone, which makes the two degenerate priors one
code path: the zero prior has d*_j = d_j, and the flat homoscedastic limit
(symbolic tag) uses the rescaled limit d*_j = d_j^2, under which a_j = d_j
below the cutoff and the reported m_seq / c_star are the correspondingly
rescaled limits (all stated identities continue to hold verbatim).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooSmallError, ShrinkageError
from .model import FLAT_PRIOR, effective_gamma
from .validation import check_positive, readonly

# |recomputed c* - stored c*| tolerance in max_value_diagnostic.
CSTAR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DirectionSolution:
    """Solved direction: a_dag in input order plus solver diagnostics.

    perm sorts coordinates by d* nonincreasing (stable in the original
    index), m_seq holds (M_3, ..., M_p) in that sorted order, and
    c_star = M_nu = tr(D A) - 2 max_j d_j a_j.
    """

    a_dag: np.ndarray
    nu: int
    m_seq: np.ndarray
    c_star: float
    perm: np.ndarray
    d_star: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a_dag", readonly(self.a_dag))
        object.__setattr__(self, "m_seq", readonly(self.m_seq))
        object.__setattr__(self, "d_star", readonly(self.d_star))
        perm = np.asarray(self.perm, dtype=int).copy()
        perm.flags.writeable = False
        object.__setattr__(self, "perm", perm)

    @property
    def p(self) -> int:
        return int(self.a_dag.shape[0])

    def to_dict(self) -> dict:
        return {
            "a_dag": self.a_dag.tolist(),
            "nu": int(self.nu),
            "m_seq": self.m_seq.tolist(),
            "c_star": float(self.c_star),
            "perm": self.perm.tolist(),
            "d_star": self.d_star.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DirectionSolution":
        return cls(
            a_dag=np.asarray(data["a_dag"], dtype=float),
            nu=int(data["nu"]),
            m_seq=np.asarray(data["m_seq"], dtype=float),
            c_star=float(data["c_star"]),
            perm=np.asarray(data["perm"], dtype=int),
            d_star=np.asarray(data["d_star"], dtype=float),
        )


def _importance(d, gamma):
    """d*_j for explicit gamma arrays or the flat symbolic tag."""
    if isinstance(gamma, str):
        if gamma != FLAT_PRIOR:
            raise ValueError(f"unknown prior tag {gamma!r}")
        return d * d
    return d * d / (d + gamma)


def bayes_importance(d, gamma):
    """Bayes importance values and the sorting permutation.

    Parameters
    ----------
    d : array-like
        Positive observation variances.
    gamma : array-like, scalar, PriorSpec or None
        Prior variances; None means the zero prior.

    Returns
    -------
    d_star : ndarray
        d*_j = d_j^2/(d_j + gamma_j) in input order (d_j^2 under the flat tag).
    perm : ndarray of int
        Indices sorting d_star nonincreasing, ties kept in input order.
    """
    d = check_positive(d, "d")
    gamma = effective_gamma(gamma, d.shape[0])
    d_star = _importance(d, gamma)
    perm = np.argsort(-d_star, kind="stable")
    return d_star, perm


def _m_from_importance(ds):
    """(M_3, ..., M_p) from importances sorted nonincreasing."""
    p = ds.shape[0]
    inv_cum = np.cumsum(1.0 / ds)
    suffix = np.sum(ds) - np.cumsum(ds)
    k = np.arange(3, p + 1)
    return (k - 2.0) ** 2 / inv_cum[k - 1] + suffix[k - 1]


def _cutoff_from_importance(ds):
    """Smallest k in [3, p-1] whose averaged criterion strictly clears d*_{k+1}."""
    p = ds.shape[0]
    inv_cum = np.cumsum(1.0 / ds)
    for k in range(3, p):
        if (k - 2.0) / inv_cum[k - 1] > ds[k]:
            return k
    return p


def _sorted_importance(d, gamma):
    d = check_positive(d, "d")
    if d.shape[0] < 3:
        raise DimensionTooSmallError(
            f"direction solving needs p >= 3, got p = {d.shape[0]}"
        )
    gamma = effective_gamma(gamma, d.shape[0])
    return d, _importance(d, gamma)


def m_sequence(d, gamma):
    """(M_3, ..., M_p) for inputs already sorted by d* nonincreasing."""
    d, ds = _sorted_importance(d, gamma)
    return _m_from_importance(ds)


def find_cutoff(d, gamma) -> int:
    """Cutoff index nu for inputs already sorted by d* nonincreasing."""
    d, ds = _sorted_importance(d, gamma)
    return _cutoff_from_importance(ds)


def solve_direction(d, gamma) -> DirectionSolution:
    """Solve for the optimal diagonal direction under prior variances gamma.

    Accepts explicit gamma (array or scalar), None / PriorSpec.zero(), or the
    flat homoscedastic tag.  Output a_dag is in input coordinate order and is
    scaled so that c_star = sum_j a_j^2 (d_j + gamma_j) = M_nu; any positive
    rescaling yields the same estimator.
    """
    d = check_positive(d, "d")
    p = d.shape[0]
    if p < 3:
        raise DimensionTooSmallError(f"direction solving needs p >= 3, got p = {p}")
    d_star, perm = bayes_importance(d, gamma)
    ds = d_star[perm]
    dd = d[perm]
    nu = _cutoff_from_importance(ds)
    m_seq = _m_from_importance(ds)
    c_star = float(m_seq[nu - 3])

    inv_cum_nu = float(np.sum(1.0 / ds[:nu]))
    a_sorted = ds / dd  # below the cutoff: d_j/(d_j+gamma_j), or d_j in the flat limit
    a_sorted[:nu] = (nu - 2.0) / (dd[:nu] * inv_cum_nu)
    a_dag = np.empty(p)
    a_dag[perm] = a_sorted

    return DirectionSolution(
        a_dag=a_dag, nu=nu, m_seq=m_seq, c_star=c_star, perm=perm, d_star=d_star
    )


def max_value_diagnostic(sol: DirectionSolution, d, gamma=None) -> float:
    """Recompute c*(D, A_dag) = tr(D A) - 2 max_j d_j a_j from scratch.

    Returns the recomputed value; raises if it drifts from sol.c_star by more
    than 1e-10 (relative to its size), which would indicate an inconsistent
    or hand-edited solution object.
    """
    d = check_positive(d, "d")
    da = d * sol.a_dag
    c = float(np.sum(da) - 2.0 * np.max(da))
    if abs(c - sol.c_star) > CSTAR_TOL * max(1.0, abs(c)):
        raise ShrinkageError(
            f"solution c_star {sol.c_star!r} disagrees with recomputed {c!r}"
        )
    return c
