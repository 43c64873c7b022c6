"""Brute-force search oracle for destabilizing bang-bang controls.

The instability test is one-sided: exhibiting any horizon t and control u
with rho(C(t, u)) >= 1 certifies that the system is not globally
asymptotically stable (a periodic extension of u then grows without
bound). The searches below are lower-bound oracles over bang-bang arc
grids; when no witness is found the verdict stays "undetermined".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import expm, perron_pair, spectral_radius
from .model import MIN_ARC, BangBangControl, PBCSystem, transition_matrix

DEFAULT_BUDGET = 1_000_000

#: rho >= 1 + this margin certifies "not GAS".
GAS_MARGIN = 1e-9


class BudgetExceeded(RuntimeError):
    """Evaluation cap hit before the enumeration finished."""


@dataclass(frozen=True)
class SearchResult:
    best_control: BangBangControl
    best_rho: float
    evaluations: int
    trace: tuple = ()  # accepted rho values, non-decreasing


def _control_from_times(r: int, times, T: float) -> BangBangControl:
    """Normalize a non-decreasing switch-time tuple into a control,
    dropping degenerate arcs (which merges the equal-sign neighbours)."""
    arcs = []
    prev = 0.0
    sign = r
    for t in list(times) + [T]:
        dur = t - prev
        if dur > MIN_ARC:
            if arcs and arcs[-1][1] == sign:
                arcs[-1] = (arcs[-1][0] + dur, sign)
            else:
                arcs.append((dur, sign))
        prev = t
        sign = -sign
    if not arcs:  # zero-length horizon cannot happen (T > 0)
        arcs = [(T, r)]
    switch = np.cumsum([d for d, _ in arcs[:-1]])
    return BangBangControl(int(arcs[0][1]), tuple(switch))


def _rho_of_times(sys: PBCSystem, r: int, times) -> float:
    C = np.eye(sys.dim)
    prev = 0.0
    sign = r
    for t in list(times) + [sys.T]:
        if t - prev > 0:
            C = expm(sys.generator(sign) * (t - prev)) @ C
        prev = t
        sign = -sign
    return spectral_radius(C)


def grid_search(sys: PBCSystem, k: int, grid_density: int,
                budget: int = DEFAULT_BUDGET) -> SearchResult:
    """Enumerate all k-arc bang-bang controls whose switch times lie on a
    uniform grid of ``grid_density`` points over [0, T], for both initial
    signs. Deterministic: candidates are scanned with r = -1 first and
    switch-time tuples in lexicographic order; only strict improvements
    are accepted, so ties resolve to the earliest candidate.
    """
    if k < 1:
        raise ValueError("arc count k must be >= 1")
    if grid_density < 2:
        raise ValueError("grid_density must be >= 2")
    points = np.linspace(0.0, sys.T, grid_density)

    best = None
    evals = 0
    for r in (-1, 1):
        for times in itertools.combinations_with_replacement(points, k - 1):
            evals += 1
            if evals > budget:
                raise BudgetExceeded(
                    f"evaluation budget {budget} exhausted")
            rho = _rho_of_times(sys, r, times)
            if best is None or rho > best[0]:
                best = (rho, r, times)

    control = _control_from_times(best[1], best[2], sys.T)
    best_rho = perron_pair(transition_matrix(sys, control)).rho
    return SearchResult(control, best_rho, evals, (best_rho,))


def refine(sys: PBCSystem, seed: BangBangControl,
           initial_step: float | None = None, shrink: float = 0.5,
           min_step_rel: float = 1e-9) -> SearchResult:
    """Coordinate-wise hill climbing on the switch times with a shrinking
    step. Accepts only strict improvements, so the rho trace is monotone."""
    T = sys.T
    step = initial_step if initial_step is not None else T / 16.0
    times = list(seed.switch_times)
    r = seed.r

    def evaluate(ts):
        if any(t <= MIN_ARC or t >= T - MIN_ARC for t in ts):
            return None
        if any(b - a <= MIN_ARC for a, b in zip(ts, ts[1:])):
            return None
        return _rho_of_times(sys, r, ts)

    rho = _rho_of_times(sys, r, times)
    trace = [rho]
    evals = 1
    while step >= min_step_rel * T:
        improved = False
        for i in range(len(times)):
            for delta in (step, -step):
                cand = list(times)
                cand[i] += delta
                val = evaluate(cand)
                evals += 1
                if val is not None and val > rho:
                    times, rho = cand, val
                    trace.append(rho)
                    improved = True
        if not improved:
            step *= shrink

    control = (BangBangControl(r, tuple(times)) if times
               else BangBangControl(r))
    best_rho = perron_pair(transition_matrix(sys, control)).rho
    return SearchResult(control, best_rho, evals, tuple(trace))


def periodic_extension(u: BangBangControl, T: float, reps: int):
    """Periodic extension of u to horizon reps * T.

    Returns (control, reps * T); same-sign arcs at the period seams merge.
    """
    arcs = u.arcs(T) * reps
    merged: list = []
    for d, v in arcs:
        if merged and merged[-1][1] == v:
            merged[-1] = (merged[-1][0] + d, v)
        else:
            merged.append((d, v))
    times = np.cumsum([d for d, _ in merged[:-1]])
    return BangBangControl(int(merged[0][1]), tuple(times)), reps * T


@dataclass(frozen=True)
class GASVerdict:
    status: str                      # "not_GAS_certified" | "undetermined"
    witness: BangBangControl | None
    witness_horizon: float | None
    witness_rho: float | None
    curve: tuple                     # (t, best_rho ** (1/t)) samples


def rho_t_curve(sys: PBCSystem, horizons, k: int, grid_density: int,
                budget: int = DEFAULT_BUDGET) -> GASVerdict:
    """Estimate the per-time maximal spectral radius over a list of
    horizons and certify "not GAS" when any grid optimum reaches 1.

    This is a lower-bound method: it can certify instability but never
    stability, hence "undetermined" in the absence of a witness.
    """
    horizons = [float(t) for t in horizons]
    if not horizons:
        raise ValueError("need at least one horizon")
    curve = []
    witness = None
    for t in horizons:
        res = grid_search(sys.with_horizon(t), k, grid_density, budget)
        curve.append((t, res.best_rho ** (1.0 / t)))
        if res.best_rho >= 1.0 + GAS_MARGIN and witness is None:
            witness = (res.best_control, t, res.best_rho)
    if witness is not None:
        return GASVerdict("not_GAS_certified", witness[0], witness[1],
                          witness[2], tuple(curve))
    return GASVerdict("undetermined", None, None, None, tuple(curve))
