"""Reduction of a general (Sigma, Q) problem to canonical diagonal form.

A nonsingular B with Q = B'B and B Sigma B' = D (diagonal) turns the general
problem into canonical coordinates: X* = BX ~ N(B theta, D) under squared
error loss.  We build B = O R with R the symmetric square root of Q and O an
orthogonal matrix diagonalizing R Sigma R; the d_j are then the eigenvalues
of Sigma Q.

Directions transfer by conjugation: a diagonal direction A* in canonical
coordinates corresponds to A = B^{-1} A* B, which automatically satisfies
A Sigma = Sigma A' and Q A = A' Q.  Conversely a general direction satisfying
those identities can be reduced to its diagonal a* by simultaneous
diagonalization, with ties in d handled by a block rotation so the result
does not depend on which factorization numpy happened to return.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditionA2ViolatedError, NotPositiveDefiniteError
from .validation import EIG_TIE_TOL, SYM_TOL, as_matrix, check_spd, readonly

# Relative tolerance on B reconstruction identities.
FACTOR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Factorization:
    """B = O R with Q = B'B and B Sigma B' = diag(d)."""

    b: np.ndarray
    d: np.ndarray
    r: np.ndarray
    o: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", readonly(self.b))
        object.__setattr__(self, "d", readonly(self.d))
        object.__setattr__(self, "r", readonly(self.r))
        object.__setattr__(self, "o", readonly(self.o))

    @property
    def p(self) -> int:
        return int(self.d.shape[0])


def symmetric_sqrt(q) -> np.ndarray:
    """Symmetric positive definite square root via eigendecomposition."""
    q = check_spd(q, "q")
    w, v = np.linalg.eigh(q)
    return (v * np.sqrt(w)) @ v.T


def _sym(m):
    return (m + m.T) / 2.0


def _tie_groups(values, tol=EIG_TIE_TOL):
    """Group consecutive sorted values equal within a relative tolerance."""
    groups = []
    start = 0
    scale = max(1.0, float(np.max(np.abs(values))))
    for i in range(1, len(values) + 1):
        if i == len(values) or abs(values[i] - values[i - 1]) > tol * scale:
            groups.append(slice(start, i))
            start = i
    return groups


def _simultaneous_diagonalize(s, t):
    """Diagonalize commuting symmetric s and t by one orthogonal matrix.

    eigh(s) alone fixes the eigenbasis only up to rotations inside repeated
    eigenspaces of s; within each tied group we re-diagonalize the restriction
    of t so both become diagonal.  Returns (w, v) with v orthogonal,
    v' s v = diag(w) and v' t v diagonal.
    """
    w, v = np.linalg.eigh(_sym(s))
    for g in _tie_groups(w):
        if g.stop - g.start > 1:
            block = v[:, g]
            sub = _sym(block.T @ t @ block)
            _, u = np.linalg.eigh(sub)
            v[:, g] = block @ u
    return w, v


def factor_problem(sigma, q) -> Factorization:
    """Factor (Sigma, Q) into B = O R with B Sigma B' diagonal.

    Eigenvalues d come out in ascending order (numpy's deterministic eigh
    ordering), ties resolved by ascending index.  Raises if either matrix
    fails the symmetric positive definite check.
    """
    sigma = check_spd(sigma, "sigma")
    q = check_spd(as_matrix(q, "q", sigma.shape[0]), "q")
    r = symmetric_sqrt(q)
    s = _sym(r @ sigma @ r)
    w, v = np.linalg.eigh(s)
    if w[0] <= SYM_TOL * max(1.0, w[-1]):
        raise NotPositiveDefiniteError("Sigma Q has a nonpositive eigenvalue")
    o = v.T
    b = o @ r
    fact = Factorization(b=b, d=w, r=r, o=o)
    _check_reconstruction(fact, sigma, q)
    return fact


def _check_reconstruction(fact, sigma, q):
    scale_q = max(1.0, float(np.linalg.norm(q)))
    scale_d = max(1.0, float(np.max(fact.d)))
    err_q = float(np.linalg.norm(fact.b.T @ fact.b - q))
    err_d = float(np.linalg.norm(fact.b @ sigma @ fact.b.T - np.diag(fact.d)))
    if err_q > FACTOR_TOL * scale_q or err_d > FACTOR_TOL * scale_d:
        raise NotPositiveDefiniteError(
            f"factorization failed reconstruction: |B'B-Q|={err_q:.2e}, "
            f"|B Sigma B' - D|={err_d:.2e}"
        )


def check_condition_a(sigma, a) -> bool:
    """True iff A Sigma is nonnegative definite (its symmetric part is PSD).

    Tolerance: minimum eigenvalue of sym(A Sigma) >= -1e-10 * ||A Sigma||_F.
    """
    sigma = as_matrix(sigma, "sigma")
    a = as_matrix(a, "a", sigma.shape[0])
    m = a @ sigma
    scale = float(np.linalg.norm(m))
    if scale == 0.0:
        return True
    w = np.linalg.eigvalsh(_sym(m))
    return bool(w[0] >= -SYM_TOL * scale)


def check_condition_a2(sigma, q, a) -> bool:
    """True iff A Sigma = Sigma A' and Q A = A' Q within relative tolerance."""
    sigma = as_matrix(sigma, "sigma")
    q = as_matrix(q, "q", sigma.shape[0])
    a = as_matrix(a, "a", sigma.shape[0])
    m1 = a @ sigma
    m2 = q @ a
    e1 = float(np.linalg.norm(m1 - m1.T)) <= SYM_TOL * max(1.0, float(np.linalg.norm(m1)))
    e2 = float(np.linalg.norm(m2 - m2.T)) <= SYM_TOL * max(1.0, float(np.linalg.norm(m2)))
    return bool(e1 and e2)


def c_star_general(sigma, q, a) -> float:
    """Minimax constant c*(Sigma, Q, A) = tr(A Sigma Q) - lmax(A Sigma Q + Sigma A' Q).

    The matrix A Sigma Q + Sigma A' Q is similar to a symmetric matrix via
    conjugation by sqrt(Q), so its eigenvalues are real; we compute the
    largest one through that symmetric form for determinism.
    """
    sigma = as_matrix(sigma, "sigma")
    q = as_matrix(q, "q", sigma.shape[0])
    a = as_matrix(a, "a", sigma.shape[0])
    r = symmetric_sqrt(q)
    m = r @ a @ sigma @ r  # similar image of A Sigma Q; sym(2m) ~ the sum above
    lmax = float(np.linalg.eigvalsh(m + m.T)[-1])
    return float(np.trace(a @ sigma @ q)) - lmax


def map_direction(fact: Factorization, a_star) -> np.ndarray:
    """Pull a canonical diagonal direction back to original coordinates.

    A = B^{-1} diag(a*) B.  The result satisfies both joint-diagonalizability
    identities by construction, and A Sigma is nonnegative definite whenever
    a* >= 0.
    """
    a_star = np.asarray(a_star, dtype=float)
    if a_star.ndim != 1 or a_star.shape[0] != fact.p:
        raise ValueError("a_star must be a length-p vector")
    return np.linalg.solve(fact.b, a_star[:, None] * fact.b)


def to_canonical_direction(sigma, q, a):
    """Diagonalize a general direction A jointly with (Sigma, Q).

    Requires A Sigma = Sigma A' and Q A = A' Q.  Returns (b, d, a_star) with
    Q = B'B, B Sigma B' = diag(d) and A = B^{-1} diag(a*) B.  The eigenvector
    basis is refined inside tied eigenvalue groups of Sigma Q so a_star is
    well defined even with repeated d_j.
    """
    sigma = check_spd(sigma, "sigma")
    q = check_spd(as_matrix(q, "q", sigma.shape[0]), "q")
    a = as_matrix(a, "a", sigma.shape[0])
    if not check_condition_a2(sigma, q, a):
        raise ConditionA2ViolatedError(
            "direction is not jointly diagonalizable with (sigma, q)"
        )
    r = symmetric_sqrt(q)
    r_inv = np.linalg.inv(r)
    s = _sym(r @ sigma @ r)
    t = r @ a @ r_inv  # symmetric because Q A = A' Q
    w, v = _simultaneous_diagonalize(s, _sym(t))
    b = v.T @ r
    m = v.T @ _sym(t) @ v
    a_star = np.diag(m).copy()
    off = m - np.diag(a_star)
    if float(np.linalg.norm(off)) > FACTOR_TOL * max(1.0, float(np.linalg.norm(m))):
        raise ConditionA2ViolatedError(
            "direction could not be diagonalized in the canonical basis"
        )
    return b, w, a_star
