"""Built-in benchmark systems with known closed-form answers, plus the
check tables behind the ``reproduce`` CLI command.

Three cases are embedded (entries are exact decimals/rationals):

  ex2  2x2 symmetric-drift system where the switching function of u == 0
       vanishes identically (the first-order test is vacuous).
  ex4  same system; the singular bracket test evaluates to exactly 20 and
       rules u == 0 out.
  ex5  2x2 four-arc bang-bang candidate that satisfies the first-order
       test but is ruled out by the second-order test (it minimizes the
       spectral radius); all spectral data has closed forms in e^5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import first_order, high_order
from .linalg import expm, inverse, lie_bracket, perron_pair
from .model import (BangBangControl, PBCSystem, constant_control,
                    transition_matrix)


def ex2_system() -> PBCSystem:
    A = np.array([[2.2, 1.6], [1.6, -0.2]])
    B = np.array([[-1.1, 0.2], [0.95, 2.1]])
    return PBCSystem(A, B, 1.0)


def ex5_system() -> PBCSystem:
    A = np.array([[-5 / 2, 3 / 2], [3, -5 / 2]])
    B = np.array([[3 / 2, -1 / 2], [1, -3 / 2]])
    return PBCSystem(A, B, 4.0)


def ex5_control() -> BangBangControl:
    return BangBangControl(1, (1.0, 2.0, 3.0))


def get_case(name: str):
    """(system, control) for a named benchmark case."""
    if name in ("ex2", "ex4"):
        sys_ = ex2_system()
        return sys_, constant_control(0.0, sys_.T)
    if name == "ex5":
        return ex5_system(), ex5_control()
    raise KeyError(f"unknown case {name!r}; choose from ex2, ex4, ex5")


CASE_NAMES = ("ex2", "ex4", "ex5")


# closed forms for ex5 (everything is rational in e^5 and
# s = sqrt(9 + 32 e^5 + 9 e^10))

def ex5_closed_forms() -> dict:
    e5 = math.exp(5.0)
    s = math.sqrt(9 + 32 * e5 + 9 * e5 * e5)
    rho = ((9 + 7 * e5 + 9 * e5 * e5 + 3 * s * (e5 - 1))
           / (25 * e5 * e5)) ** 2
    v = np.array([e5 - 1 + s, 2 + 8 * e5])
    w = np.array([e5 - 1 + s, 4 + e5])
    a2 = 1.0 / (math.sqrt(rho) * e5) - 1.0
    alpha_bar = np.array([1.0, a2, -(a2 + 1.0), 0.0])
    r4 = (1050 * e5 * (e5 - 1)
          * (12 * (s - 3) + e5 * (-67 + s + e5 * (67 + 36 * e5 + 12 * s)))
          / ((4 + e5) * (1 + 4 * e5)
             * (9 - 3 * s + e5 * (7 + 9 * e5 + 3 * s)) ** 2))
    return {"e5": e5, "s": s, "rho": rho, "v": v, "w": w,
            "alpha_bar": alpha_bar, "r4": r4}


@dataclass(frozen=True)
class CheckRow:
    name: str
    value: float
    expected: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.value - self.expected) <= self.tol


def _angle_residual(x, y) -> float:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    return float(np.linalg.norm(x - (x @ y) * y))


def reproduce_ex2() -> list[CheckRow]:
    """Drift eigendata, z'Bz = 0 and the vacuous switching function."""
    sys_, u = get_case("ex2")
    z = np.array([2.0, 1.0])
    pp = perron_pair(expm(sys_.A))
    rows = [
        CheckRow("drift eigenvalue mu", math.log(pp.rho), 3.0, 1e-10),
        CheckRow("drift eigenvector direction [2,1]",
                 _angle_residual(pp.v, z), 0.0, 1e-10),
        CheckRow("z'Bz", float(z @ sys_.B @ z), 0.0, 1e-12),
    ]
    report = first_order.check_first_order(sys_, u)
    rows.append(CheckRow("max|m| / (||B|| rho)",
                         report.max_abs_m / report.scale, 0.0, 1e-9))
    rows.append(CheckRow("vacuous verdict",
                         1.0 if report.verdict == "vacuous" else 0.0,
                         1.0, 0.0))
    return rows


def reproduce_ex4() -> list[CheckRow]:
    """Double-bracket matrix and the singular test value of 20."""
    sys_, _ = get_case("ex4")
    bracket = lie_bracket(sys_.B, lie_bracket(sys_.B, sys_.A))
    expected = np.array([[6.8, 18.4], [21.4, -6.8]])
    res = high_order.singular_test(sys_)
    return [
        CheckRow("||[B,[B,A]] - expected||",
                 float(np.max(np.abs(bracket - expected))), 0.0, 1e-12),
        CheckRow("singular test value", res.value, 20.0, 1e-9),
        CheckRow("rules_out verdict",
                 1.0 if res.verdict == "rules_out" else 0.0, 1.0, 0.0),
    ]


def reproduce_ex5() -> list[CheckRow]:
    """Spectral closed forms, first-order consistency, and the positive
    second-order form that rules the candidate out."""
    sys_, u = get_case("ex5")
    cf = ex5_closed_forms()
    C = transition_matrix(sys_, u)
    pp = perron_pair(C)

    rows = [
        CheckRow("rho vs closed form (relative)",
                 abs(pp.rho - cf["rho"]) / cf["rho"], 0.0, 1e-8),
        CheckRow("right eigenvector direction",
                 _angle_residual(pp.v, cf["v"]), 0.0, 1e-8),
        CheckRow("left eigenvector direction",
                 _angle_residual(pp.w, cf["w"]), 0.0, 1e-8),
    ]

    report = first_order.check_first_order(sys_, u)
    rows.append(CheckRow("first-order consistent",
                         1.0 if report.verdict == "consistent" else 0.0,
                         1.0, 0.0))
    for t, res in zip((1.0, 2.0, 3.0), report.switch_residuals):
        rows.append(CheckRow(f"|m({t:g})| / max|m|",
                             res / report.max_abs_m, 0.0, 1e-8))
    rows.append(CheckRow("|m(0) - m(T)| / max|m|",
                         report.periodicity_residual, 0.0, 1e-9))

    decomp = high_order.build_H(sys_, u)
    alpha = cf["alpha_bar"]
    constraint = sum(a * H for a, H in zip(alpha, decomp.H)) @ decomp.p1
    rows.append(CheckRow("Q4 membership residual",
                         float(np.linalg.norm(constraint)
                               / np.linalg.norm(decomp.p1)), 0.0, 1e-8))

    # the benchmark closed form for r4 corresponds to eigenvectors scaled
    # to last component 1 and the one-point adjoint convention q(0) = w'
    # (a factor rho * v_2 * w_2 relative to the w'v = 1 normalization);
    # only the sign of r4 is scale-invariant
    E1 = expm(decomp.P * decomp.taus[0])
    p1 = E1 @ (cf["v"] / cf["v"][1])
    q1 = (cf["w"] / cf["w"][1]) @ inverse(E1)
    r4 = high_order.bang_quadratic_form(decomp, alpha, p1=p1, q1=q1)
    rows.append(CheckRow("r4 vs closed form (relative)",
                         abs(r4 - cf["r4"]) / cf["r4"], 0.0, 1e-6))
    rows.append(CheckRow("r4 positive", 1.0 if r4 > 0 else 0.0, 1.0, 0.0))

    second = high_order.second_order_test(decomp)
    rows.append(CheckRow("rules_out verdict",
                         1.0 if second.verdict == "rules_out" else 0.0,
                         1.0, 0.0))
    return rows


REPRODUCERS = {"ex2": reproduce_ex2, "ex4": reproduce_ex4,
               "ex5": reproduce_ex5}
