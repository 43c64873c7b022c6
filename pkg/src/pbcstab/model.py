"""Positive bilinear control system (PBCS) model.

A PBCS is ``xdot = (A + u B) x`` with ``u(t) in [-1, 1]`` and ``A + kB``
Metzler for every admissible k. Since the off-diagonal entries are affine
in k, it suffices to check the two endpoint matrices A+B and A-B; this
equivalence is exercised in the tests.

Controls are represented as finite arc lists (bang-bang, or general
piecewise constant with values in [-1, 1]); that covers every candidate
the optimality tests apply to.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_square, expm, is_metzler

#: Arc durations shorter than this are rejected at construction.
MIN_ARC = 1e-12


class InvalidInterval(ValueError):
    """Requested [a, b] is not inside [0, T] or has a > b."""


class InvalidControl(ValueError):
    """Control data violates its invariants."""


@dataclass(frozen=True)
class PBCSystem:
    """The pair (A, B) and horizon T. ``A`` is the drift, ``B`` the
    control direction."""

    A: np.ndarray
    B: np.ndarray
    T: float

    def __post_init__(self):
        object.__setattr__(self, "A", as_square(self.A))
        object.__setattr__(self, "B", as_square(self.B))
        if self.A.shape != self.B.shape:
            raise ValueError(
                f"A and B dimensions disagree: {self.A.shape} vs {self.B.shape}"
            )
        if not (self.T > 0):
            raise ValueError("horizon T must be positive")

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def generator(self, u: float) -> np.ndarray:
        """A + uB."""
        return self.A + u * self.B

    def with_horizon(self, T: float) -> "PBCSystem":
        return PBCSystem(self.A, self.B, T)


@dataclass(frozen=True)
class ValidationReport:
    metzler_plus: bool   # A + B
    metzler_minus: bool  # A - B
    messages: tuple = ()

    @property
    def valid(self) -> bool:
        return self.metzler_plus and self.metzler_minus


def validate(sys: PBCSystem, tol: float = 0.0) -> ValidationReport:
    """Check that A+B and A-B are Metzler (equivalently, A+kB Metzler for
    all k in [-1, 1])."""
    plus = is_metzler(sys.A + sys.B, tol)
    minus = is_metzler(sys.A - sys.B, tol)
    msgs = []
    if not plus:
        msgs.append("A + B has a negative off-diagonal entry")
    if not minus:
        msgs.append("A - B has a negative off-diagonal entry")
    return ValidationReport(plus, minus, tuple(msgs))


@dataclass(frozen=True)
class BangBangControl:
    """Bang-bang control: value ``r`` on the first arc, alternating sign
    at each switch time. ``switch_times`` are the interior switching
    points; the endpoints t0 = 0 and tk = T are implicit."""

    r: int
    switch_times: tuple = ()

    def __post_init__(self):
        if self.r not in (-1, 1):
            raise InvalidControl("first-arc sign r must be -1 or +1")
        ts = tuple(float(t) for t in self.switch_times)
        if any(t <= 0 for t in ts):
            raise InvalidControl("switch times must be positive")
        if any(b - a < MIN_ARC for a, b in zip(ts, ts[1:])):
            raise InvalidControl("switch times must be strictly increasing "
                                 f"with gaps above {MIN_ARC}")
        object.__setattr__(self, "switch_times", ts)

    @property
    def num_arcs(self) -> int:
        return len(self.switch_times) + 1

    def arcs(self, T: float):
        """List of (duration, value) pairs over [0, T]."""
        ts = (0.0,) + self.switch_times + (T,)
        if ts[-2] >= T - MIN_ARC and self.switch_times:
            raise InvalidControl(f"last switch time {ts[-2]} not inside (0, T)")
        vals = [self.r * (-1) ** i for i in range(len(ts) - 1)]
        return [(b - a, v) for a, b, v in zip(ts, ts[1:], vals)]

    def value_at(self, t: float) -> int:
        """u(t); on switch points, the value of the arc to the right."""
        i = sum(1 for s in self.switch_times if s <= t)
        return self.r * (-1) ** i


@dataclass(frozen=True)
class PiecewiseConstantControl:
    """Piecewise-constant control given by breakpoints 0 = s0 < ... < sm = T
    and one value in [-1, 1] per arc."""

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp = tuple(float(s) for s in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(bp) != len(vals) + 1:
            raise InvalidControl("need exactly one value per arc")
        if any(b - a < MIN_ARC for a, b in zip(bp, bp[1:])):
            raise InvalidControl("breakpoints must be strictly increasing")
        if any(abs(v) > 1 for v in vals):
            raise InvalidControl("control values must lie in [-1, 1]")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def num_arcs(self) -> int:
        return len(self.values)

    def arcs(self, T: float):
        bp = self.breakpoints
        if abs(bp[0]) > MIN_ARC or abs(bp[-1] - T) > 1e-9 * max(T, 1.0):
            raise InvalidControl(f"breakpoints must span [0, {T}]")
        return [(b - a, v) for a, b, v in zip(bp, bp[1:], self.values)]

    def value_at(self, t: float) -> float:
        for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values):
            if t < b:
                return v
        return self.values[-1]


Control = BangBangControl | PiecewiseConstantControl


def constant_control(value: float, T: float) -> PiecewiseConstantControl:
    return PiecewiseConstantControl((0.0, T), (value,))


def bang_to_piecewise(u: BangBangControl, T: float) -> PiecewiseConstantControl:
    arcs = u.arcs(T)
    bp = np.concatenate([[0.0], np.cumsum([d for d, _ in arcs])])
    bp[-1] = T
    return PiecewiseConstantControl(tuple(bp), tuple(v for _, v in arcs))


def piecewise_to_bang(u: PiecewiseConstantControl) -> BangBangControl:
    """Exact conversion back; requires alternating +/-1 values."""
    vals = u.values
    if any(v not in (-1.0, 1.0) for v in vals):
        raise InvalidControl("not a bang-bang control: values outside {-1, +1}")
    if any(a == b for a, b in zip(vals, vals[1:])):
        raise InvalidControl("not in normal form: adjacent arcs share a sign")
    return BangBangControl(int(vals[0]), u.breakpoints[1:-1])


def transition_matrix(sys: PBCSystem, u: Control, a: float = 0.0,
                      b: float | None = None) -> np.ndarray:
    """Transition matrix C(b, a, u): ordered product of exp((A + u_i B) d_i)
    over the arcs intersecting [a, b], rightmost factor earliest in time."""
    if b is None:
        b = sys.T
    if not (0.0 <= a <= b <= sys.T + 1e-12 * max(sys.T, 1.0)):
        raise InvalidInterval(f"need 0 <= a <= b <= T, got a={a}, b={b}")
    C = np.eye(sys.dim)
    t = 0.0
    for dur, val in u.arcs(sys.T):
        lo, hi = max(t, a), min(t + dur, b)
        if hi - lo > 0:
            C = expm(sys.generator(val) * (hi - lo)) @ C
        t += dur
    return C


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)


def simulate(sys: PBCSystem, u: Control, x0, grid) -> Trajectory:
    """x(t) = C(t, 0, u) x0 at each sample time."""
    x0 = np.asarray(x0, dtype=float)
    times = np.asarray(sorted(float(t) for t in grid))
    states = np.empty((len(times), sys.dim))
    C = np.eye(sys.dim)
    prev = 0.0
    for i, t in enumerate(times):
        if t > prev:
            C = transition_matrix(sys, u, prev, t) @ C
            prev = t
        states[i] = C @ x0
    return Trajectory(times, states)


def cyclic_shift(u: BangBangControl, pivot: int, T: float) -> BangBangControl:
    """Rotate the arc sequence so that switch point ``pivot`` becomes time 0.

    ``pivot = 0`` denotes the start of the control (identity shift);
    ``pivot = j`` for j >= 1 rotates switch time t_j to the origin. The
    total duration T is preserved, and the first and last arcs of the
    rotation merge when they carry the same sign.
    """
    if not (0 <= pivot <= len(u.switch_times)):
        raise IndexError(f"pivot {pivot} out of range")
    if pivot == 0:
        return u
    arcs = u.arcs(T)
    rotated = arcs[pivot:] + arcs[:pivot]
    # for an odd arc count the seam joins two same-sign arcs; merge them
    merged: list = []
    for d, v in rotated:
        if merged and merged[-1][1] == v:
            merged[-1] = (merged[-1][0] + d, v)
        else:
            merged.append((d, v))
    times = np.cumsum([d for d, _ in merged[:-1]])
    return BangBangControl(int(merged[0][1]), tuple(times))


# ---------------------------------------------------------------------------
# JSON document schema (see README): {"A": [[...]], "B": [[...]], "T": t,
#   "control": {"type": "bangbang", "r": +-1, "switch_times": [...]}
#            | {"type": "piecewise", "breakpoints": [...], "values": [...]}}
# ---------------------------------------------------------------------------

def control_from_dict(d: dict) -> Control:
    kind = d.get("type")
    if kind == "bangbang":
        return BangBangControl(int(d["r"]), tuple(d.get("switch_times", ())))
    if kind == "piecewise":
        return PiecewiseConstantControl(tuple(d["breakpoints"]),
                                        tuple(d["values"]))
    raise InvalidControl(f"unknown control type: {kind!r}")


def control_to_dict(u: Control) -> dict:
    if isinstance(u, BangBangControl):
        return {"type": "bangbang", "r": u.r,
                "switch_times": list(u.switch_times)}
    return {"type": "piecewise", "breakpoints": list(u.breakpoints),
            "values": list(u.values)}


def load_document(path):
    """Read a system (and optional control) from a JSON file.

    Returns (PBCSystem, control-or-None). Raises ValueError/KeyError on a
    malformed document and json.JSONDecodeError on unparsable input.
    """
    with open(path) as fh:
        doc = json.load(fh)
    sys_ = PBCSystem(np.array(doc["A"], dtype=float),
                     np.array(doc["B"], dtype=float), float(doc["T"]))
    u = control_from_dict(doc["control"]) if "control" in doc else None
    return sys_, u


def dump_document(sys: PBCSystem, u: Control | None = None) -> dict:
    doc = {"A": sys.A.tolist(), "B": sys.B.tolist(), "T": sys.T}
    if u is not None:
        doc["control"] = control_to_dict(u)
    return doc
