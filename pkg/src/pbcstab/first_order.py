"""First-order maximum-principle test for spectral-radius optimality.

Given a candidate control u on [0, T], the adjoint curves are

    p(t) = C(t, 0, u) v,      q(t)' = w' C(T, t, u),

where (rho, v, w) is the Perron data of C(T, u) with w'v = 1. The
switching function m(t) = q(t)' B p(t) must agree in sign with u(t)
almost everywhere for u to survive the first-order test. m is
"periodic": m(T) = m(0), and q(t)' p(t) = rho for all t.

All curves are evaluated in closed form through transition matrices; no
ODE stepping is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import NotSimple, expm, perron_pair
from .model import (BangBangControl, Control, PBCSystem, transition_matrix)

#: Default number of uniform grid samples (declared switch times are
#: always appended).
DEFAULT_GRID = 2048

#: max|m| below this multiple of ||B|| * rho means the switching function
#: vanishes identically (vacuous verdict).
VACUOUS_RTOL = 1e-9


class NotSymmetric(ValueError):
    """A or B is not symmetric, so the collinearity identity does not apply."""


def default_grid(sys: PBCSystem, u: Control, samples: int = DEFAULT_GRID):
    """Uniform samples on [0, T] plus every declared arc boundary."""
    ts = np.linspace(0.0, sys.T, samples)
    bounds = np.cumsum([d for d, _ in u.arcs(sys.T)])[:-1]
    return np.unique(np.concatenate([ts, bounds]))


@dataclass(frozen=True)
class AdjointData:
    perron: linalg.PerronPair
    times: np.ndarray
    p: np.ndarray  # shape (len(times), n)
    q: np.ndarray  # shape (len(times), n)


def adjoint_data(sys: PBCSystem, u: Control, grid=None) -> AdjointData:
    """Evaluate p and q on the grid. Raises NotSimple when the Perron root
    of C(T, u) is not a simple eigenvalue."""
    if grid is None:
        grid = default_grid(sys, u)
    times = np.asarray(sorted(float(t) for t in grid))
    pp = perron_pair(transition_matrix(sys, u))
    if not pp.is_simple:
        raise NotSimple("Perron root of C(T, u) is not simple")

    n = sys.dim
    p = np.empty((len(times), n))
    q = np.empty((len(times), n))
    # forward pass: p(t) = C(t, 0) v
    C = np.eye(n)
    prev = 0.0
    for i, t in enumerate(times):
        if t > prev:
            C = transition_matrix(sys, u, prev, t) @ C
            prev = t
        p[i] = C @ pp.v
    # backward pass: q(t)' = w' C(T, t); accumulating from t = T avoids
    # the ill-conditioned inverse of C(t, 0)
    R = np.eye(n)
    nxt = sys.T
    for i in range(len(times) - 1, -1, -1):
        t = times[i]
        if t < nxt:
            R = R @ transition_matrix(sys, u, t, nxt)
            nxt = t
        q[i] = pp.w @ R
    return AdjointData(pp, times, p, q)


@dataclass(frozen=True)
class SwitchingFunctionSamples:
    times: np.ndarray
    values: np.ndarray
    sign_changes: tuple        # interpolated zero-crossing locations
    periodicity_residual: float  # |m(T) - m(0)| / scale


def switching_function(sys: PBCSystem, u: Control,
                       grid=None) -> SwitchingFunctionSamples:
    """m(t) = q(t)' B p(t) on the grid, with detected sign changes."""
    adj = adjoint_data(sys, u, grid)
    m = np.einsum("ij,ij->i", adj.q, adj.p @ sys.B.T)
    scale = max(np.max(np.abs(m)), np.finfo(float).tiny)
    crossings = []
    for i in range(len(m) - 1):
        if m[i] * m[i + 1] < 0:
            t0, t1 = adj.times[i], adj.times[i + 1]
            crossings.append(t0 + (t1 - t0) * m[i] / (m[i] - m[i + 1]))
    return SwitchingFunctionSamples(
        adj.times, m, tuple(crossings),
        periodicity_residual=abs(m[-1] - m[0]) / scale)


@dataclass(frozen=True)
class MPReport:
    verdict: str               # "consistent" | "violated" | "vacuous"
    max_abs_m: float
    scale: float               # vacuous threshold reference ||B|| * rho
    periodicity_residual: float
    switch_residuals: tuple    # |m(t_i)| at declared switch times
    violation_margin: float    # worst sign disagreement, as fraction of max|m|


def check_first_order(sys: PBCSystem, u: Control, grid=None,
                      tol: float = 1e-6) -> MPReport:
    """Verdict of the first-order test for a bang-bang or constant control.

    Sign agreement is required only where |m(t)| > tol * max|m| ("almost
    all t" on a grid); the verdict is vacuous when m vanishes identically
    relative to ||B|| * rho.
    """
    if grid is None:
        grid = default_grid(sys, u)
    adj = adjoint_data(sys, u, grid)
    m = np.einsum("ij,ij->i", adj.q, adj.p @ sys.B.T)
    mmax = float(np.max(np.abs(m)))
    bscale = np.linalg.norm(sys.B, 2) * adj.perron.rho

    switch_ts = np.cumsum([d for d, _ in u.arcs(sys.T)])[:-1]
    sw_res = tuple(
        float(abs(np.interp(t, adj.times, m))) for t in switch_ts)

    if mmax <= VACUOUS_RTOL * max(bscale, np.finfo(float).tiny):
        return MPReport("vacuous", mmax, bscale, 0.0, sw_res, 0.0)

    worst = 0.0
    for t, mt in zip(adj.times, m):
        if abs(mt) <= tol * mmax:
            continue
        if mt * u.value_at(min(t, sys.T - 1e-15)) < 0:
            worst = max(worst, abs(mt) / mmax)
    verdict = "violated" if worst > tol else "consistent"
    per = abs(m[-1] - m[0]) / mmax
    return MPReport(verdict, mmax, bscale, per, sw_res, worst)


def symmetric_collinearity_check(sys: PBCSystem, u: BangBangControl,
                                 tol: float = 1e-9) -> float:
    """For symmetric A, B and a two-arc bang-bang control, the left Perron
    vector satisfies exp((A - rB) tau2) w = const * v. Returns the sine of
    the angle between exp((A - rB) tau2) w and v."""
    if not np.allclose(sys.A, sys.A.T, atol=tol * max(1.0, np.linalg.norm(sys.A))):
        raise NotSymmetric("A is not symmetric")
    if not np.allclose(sys.B, sys.B.T, atol=tol * max(1.0, np.linalg.norm(sys.B))):
        raise NotSymmetric("B is not symmetric")
    arcs = u.arcs(sys.T)
    if len(arcs) != 2:
        raise ValueError("collinearity check applies to two-arc controls")
    tau2 = arcs[1][0]
    pp = perron_pair(transition_matrix(sys, u))
    if not pp.is_simple:
        raise NotSimple("Perron root is not simple")
    y = expm(sys.generator(-u.r) * tau2) @ pp.w
    ny = np.linalg.norm(y)
    if ny == 0:
        return 0.0
    y = y / ny
    v = pp.v / np.linalg.norm(pp.v)
    return float(np.linalg.norm(y - (y @ v) * v))


def write_csv(samples: SwitchingFunctionSamples, path) -> None:
    """(t, m(t)) pairs with 17-significant-digit decimal formatting."""
    with open(path, "w") as fh:
        fh.write("time,m\n")
        for t, mt in zip(samples.times, samples.values):
            fh.write(f"{t:.17g},{mt:.17g}\n")
