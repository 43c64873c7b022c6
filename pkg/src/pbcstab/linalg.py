"""Dense linear-algebra kernel: Metzler predicate, matrix exponential,
dominant (Perron) eigenpair, group inverse, Lie brackets.

All matrices are plain numpy arrays (square, real, finite). Functions are
pure and never mutate their arguments.

The Lie bracket used throughout this package is ``[P, Q] = QP - PQ``
(note the sign: the reverse of the physics convention). Every downstream
formula assumes this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

#: Relative eigenvalue gap below which a dominant eigenvalue is not
#: considered simple.
SIMPLICITY_RTOL = 1e-8


class LinAlgError(Exception):
    """Base class for numerical failures in this module."""


class NonConvergence(LinAlgError):
    """Eigen computation did not meet the residual contract."""


class NotSimple(LinAlgError):
    """Dominant eigenvalue is not simple at working precision."""


class SingularMatrix(LinAlgError):
    """Matrix is numerically singular."""


def as_square(M) -> np.ndarray:
    """Coerce to a float square matrix, rejecting non-finite entries."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def is_metzler(M, tol: float = 0.0) -> bool:
    """True iff every off-diagonal entry of M is >= -tol."""
    M = as_square(M)
    off = M - np.diag(np.diag(M))
    return bool(np.min(off) >= -tol)


def expm(M) -> np.ndarray:
    """Matrix exponential e^M.

    Delegates to scipy's scaling-and-squaring Pade implementation, which
    meets the <= 1e-12 relative accuracy contract for ||M|| <= 50.
    """
    M = as_square(M)
    E = scipy.linalg.expm(M)
    if not np.all(np.isfinite(E)):
        raise OverflowError("matrix exponential overflowed")
    return E


def lie_bracket(P, Q) -> np.ndarray:
    """Bracket [P, Q] := QP - PQ."""
    P = as_square(P)
    Q = as_square(Q)
    if P.shape != Q.shape:
        raise ValueError(f"dimension mismatch: {P.shape} vs {Q.shape}")
    return Q @ P - P @ Q


@dataclass(frozen=True)
class PerronPair:
    """Dominant eigenvalue of a nonnegative matrix with right/left
    eigenvectors normalized so that ``w @ v == 1``.

    ``gap`` is the margin |rho| - |second largest eigenvalue|; the pair is
    treated as simple when the gap exceeds ``SIMPLICITY_RTOL * rho``.
    """

    rho: float
    v: np.ndarray
    w: np.ndarray
    gap: float

    @property
    def is_simple(self) -> bool:
        return self.gap > SIMPLICITY_RTOL * abs(self.rho)


def perron_pair(C, tol: float = 1e-10) -> PerronPair:
    """Dominant eigenpair of a (numerically) nonnegative matrix.

    Matrices here are desk-scale, so a full dense eigensolve is used for
    both sides. The returned pair satisfies

        ||C v - rho v|| <= tol * ||C||,   ||C' w - rho w|| <= tol * ||C||,

    with v sign-fixed (largest-magnitude entry positive, unit norm) and w
    scaled to ``w @ v == 1``.
    """
    C = as_square(C)
    eigvals, right = np.linalg.eig(C)
    order = np.argsort(-np.abs(eigvals))
    eigvals = eigvals[order]
    right = right[:, order]
    lam = eigvals[0]
    rho = float(np.abs(lam))
    if rho == 0.0:
        raise NonConvergence("spectral radius is zero")
    gap = rho - (float(np.abs(eigvals[1])) if len(eigvals) > 1 else 0.0)

    v = np.real(right[:, 0])
    # left eigenvector: dominant right eigenvector of the transpose
    lvals, left = np.linalg.eig(C.T)
    w = np.real(left[:, int(np.argmin(np.abs(lvals - lam)))])

    # deterministic sign fixing: largest-|entry| of v positive, unit norm
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    v = v / np.linalg.norm(v)
    wv = float(w @ v)
    if wv == 0.0:
        raise NonConvergence("left/right eigenvectors are orthogonal")
    w = w / wv

    scale = np.linalg.norm(C, 2)
    res_r = np.linalg.norm(C @ v - rho * v)
    res_l = np.linalg.norm(C.T @ w - rho * w) / np.linalg.norm(w)
    if res_r > tol * max(scale, 1.0) or res_l > tol * max(scale, 1.0):
        raise NonConvergence(
            f"eigen residuals {res_r:.2e}/{res_l:.2e} exceed {tol:.2e}*||C||"
        )
    return PerronPair(rho=float(np.real(lam)), v=v, w=w, gap=gap)


def group_inverse(D, v, w) -> np.ndarray:
    """Group (Drazin) inverse of a matrix with a simple zero eigenvalue.

    ``v`` and ``w`` are the right/left null vectors with ``w @ v == 1``.
    Computed by the rank-one bordering formula

        D# = (D + v w')^{-1} - v w',

    which satisfies D D# = D# D, D D# D = D, D# D D# = D#, D# v = 0 and
    I - D D# = v w'.
    """
    D = as_square(D)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    vw = np.outer(v, w)
    bordered = D + vw
    if 1.0 / np.linalg.cond(bordered) < 1e-14:
        raise SingularMatrix(
            "D + vw' is numerically singular; (v, w) is not a valid "
            "simple-null-eigenpair"
        )
    return np.linalg.inv(bordered) - vw


def solve(M, b) -> np.ndarray:
    """Solve M x = b by LU with partial pivoting."""
    M = as_square(M)
    b = np.asarray(b, dtype=float)
    if 1.0 / np.linalg.cond(M) < 1e-15:
        raise SingularMatrix("matrix is numerically singular")
    return np.linalg.solve(M, b)


def inverse(M) -> np.ndarray:
    """Matrix inverse by LU with partial pivoting."""
    M = as_square(M)
    if 1.0 / np.linalg.cond(M) < 1e-15:
        raise SingularMatrix("matrix is numerically singular")
    return np.linalg.inv(M)


def spectral_radius(M) -> float:
    """max |eigenvalue|, without eigenvector extraction (cheap path for
    search loops)."""
    return float(np.max(np.abs(np.linalg.eigvals(as_square(M)))))
