"""Float matrix exponential by uniformization, plus validity and stability checks.

``e^{Qt} = sum_k Pois(k; lam t) R^k`` with ``R = I + Q/lam``.  Every ``R^k`` is
a Markov matrix, so dropping the Poisson tail beyond ``K`` moves each row by
at most the tail mass: the truncation error is bounded a priori.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .linalg import MatrixSubspace, RationalMatrix, as_rational, nullspace

SAFETY = 1e-12
MAX_TERMS = 200_000
DEFAULT_TOL = 1e-10
STABILITY_TOL = 1e-8


def _as_array(M) -> np.ndarray:
    if isinstance(M, RationalMatrix):
        return M.to_float()
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def is_rate_matrix(Q, tol: float = DEFAULT_TOL) -> bool:
    """Zero row sums and non-negative off-diagonals; exact for a RationalMatrix."""
    if isinstance(Q, RationalMatrix):
        return not any(Q.row_sums()) and all(x >= 0 for _, _, x in Q.offdiag())
    A = _as_array(Q)
    if not np.all(np.isfinite(A)):
        return False
    off = A - np.diag(np.diag(A))
    return bool(np.all(np.abs(A.sum(axis=1)) <= tol) and np.all(off >= -tol))


def is_markov_matrix(M, tol: float = DEFAULT_TOL) -> bool:
    if isinstance(M, RationalMatrix):
        return all(s == 1 for s in M.row_sums()) and all(0 <= x <= 1 for row in M.rows for x in row)
    A = _as_array(M)
    if not np.all(np.isfinite(A)):
        return False
    return bool(np.all(A >= -tol) and np.all(A <= 1 + tol) and np.all(np.abs(A.sum(axis=1) - 1) <= tol))


@dataclass
class UniformizationDecomposition:
    lam: float
    R: np.ndarray
    terms_used: int
    truncation_bound: float

    def to_json(self) -> dict:
        return {
            "lambda": float_repr(self.lam),
            "R": float_matrix_json(self.R),
            "terms_used": self.terms_used,
            "truncation_bound": float_repr(self.truncation_bound),
        }


def poisson_truncation(mu: float, tol: float) -> tuple:
    """Weights ``p_0..p_K`` and the tail bound for the smallest ``K`` with tail <= tol.

    Weights come from log space so ``e^{-mu}`` never underflows on its own.
    The tail beyond the last computed index is bounded geometrically.
    """
    if mu == 0:
        return np.ones(1), 0.0
    kmax = int(2 * mu + 12 * math.sqrt(mu) + 60)
    if kmax > MAX_TERMS:
        raise OverflowError(f"lambda*t = {mu:g} needs more than {MAX_TERMS} terms; split t")
    ks = np.arange(kmax + 1)
    logp = -mu + ks * math.log(mu) - np.array([math.lgamma(k + 1) for k in ks])
    p = np.exp(logp)
    # beyond kmax successive ratios are below mu/(kmax+1) <= 1/2
    r = mu / (kmax + 1)
    remainder = p[-1] * r / (1 - r)
    tail = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]]) + remainder
    hits = np.nonzero(tail <= tol)[0]
    if len(hits) == 0:
        raise OverflowError(f"Poisson tail for lambda*t = {mu:g} never drops below {tol:g}")
    K = int(hits[0])
    return p[: K + 1], float(tail[K])


def expm_uniformization(Q, t: float, tol: float = 1e-12):
    """``e^{Qt}`` for a rate matrix, returning the matrix and its decomposition."""
    A = _as_array(Q)
    if not is_rate_matrix(A, 1e-9):
        raise ValueError("input is not a rate matrix")
    if t < 0 or not math.isfinite(t):
        raise ValueError("t must be a finite non-negative number")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = A.shape[0]
    qmax = float(np.max(np.abs(np.diag(A)))) if n else 0.0
    if qmax == 0:
        # a rate matrix with zero diagonal is zero
        return np.eye(n), UniformizationDecomposition(1.0, np.eye(n), 1, 0.0)
    lam = qmax * (1 + SAFETY)
    R = np.eye(n) + A / lam
    weights, bound = poisson_truncation(lam * t, tol)
    M = np.zeros((n, n))
    P = np.eye(n)
    for k, w in enumerate(weights):
        if k:
            P = P @ R
        M += w * P
    if not np.all(np.isfinite(M)):
        raise OverflowError("non-finite result; split t")
    return M, UniformizationDecomposition(lam, R, len(weights), bound)


def expm_reference(Q, t: float = 1.0) -> np.ndarray:
    """Independent oracle: scipy's scaling-and-squaring Pade exponential."""
    return scipy.linalg.expm(_as_array(Q) * t)


# ---------------------------------------------------------------------------
# empirical stability


@dataclass
class StabilityObservation:
    t: float
    residual: float
    min_offdiag: float

    def ok(self, tol: float) -> bool:
        return self.residual <= tol and self.min_offdiag >= -tol


def subspace_float_basis(S: MatrixSubspace) -> np.ndarray:
    return np.array([[float(x) for x in v] for v in S.vectors]).reshape(S.dim, S.n * S.n)


def projection_residual(B: np.ndarray, X: np.ndarray) -> float:
    """Max-abs distance from ``X`` to the row span of ``B`` (least squares)."""
    v = X.reshape(-1)
    if B.shape[0] == 0:
        return float(np.max(np.abs(v))) if v.size else 0.0
    c, *_ = np.linalg.lstsq(B.T, v, rcond=None)
    return float(np.max(np.abs(v - B.T @ c)))


def empirical_stability(S: MatrixSubspace, Q, t_grid: Sequence[float], tol: float = STABILITY_TOL):
    """Observe ``e^{Qt} - I`` against the span of ``S`` on a grid of times."""
    if isinstance(Q, RationalMatrix) and not S.contains(Q):
        raise ValueError("Q is not in the model span")
    B = subspace_float_basis(S)
    A = _as_array(Q)
    n = A.shape[0]
    obs = []
    for t in t_grid:
        X = expm_reference(A, t) - np.eye(n)
        off = X[~np.eye(n, dtype=bool)]
        obs.append(StabilityObservation(float(t), projection_residual(B, X), float(off.min()) if off.size else 0.0))
    return obs, all(o.ok(tol) for o in obs)


# ---------------------------------------------------------------------------
# reversibility and equilibrium


def detailed_balance_check(Q, pi: Sequence, tol: float | None = None) -> bool:
    """``D(pi) Q == Q^T D(pi)``; exact for rational input unless ``tol`` is given."""
    if isinstance(Q, RationalMatrix) and tol is None:
        p = [as_rational(x) for x in pi]
        return all(p[i] * Q[i, j] == p[j] * Q[j, i] for i in range(Q.n) for j in range(Q.n))
    A = _as_array(Q)
    p = np.array([float(x) for x in pi])
    D = p[:, None] * A
    return bool(np.max(np.abs(D - D.T)) <= (DEFAULT_TOL if tol is None else tol))


@dataclass
class StationaryResult:
    pi: tuple | None
    kernel_dim: int

    @property
    def unique(self) -> bool:
        return self.kernel_dim == 1


def stationary_distribution(Q: RationalMatrix) -> StationaryResult:
    """Exact left kernel of ``Q``; ``pi`` is None when the kernel is not one-dimensional."""
    if not is_rate_matrix(Q):
        raise ValueError("input is not a rate matrix")
    ker = nullspace([list(col) for col in zip(*Q.rows)], Q.n)
    if len(ker) != 1:
        return StationaryResult(None, len(ker))
    v = ker[0]
    s = sum(v)
    return StationaryResult(tuple(Fraction(x) / s for x in v), 1)


# ---------------------------------------------------------------------------
# float JSON helpers


def float_repr(x: float) -> float:
    return float(f"{x:.17g}")


def float_matrix_json(A: np.ndarray) -> list:
    return [[float_repr(x) for x in row] for row in np.asarray(A, dtype=float)]


def random_rate_matrix(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    A = rng.exponential(scale, size=(n, n))
    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A, -A.sum(axis=1))
    return A
