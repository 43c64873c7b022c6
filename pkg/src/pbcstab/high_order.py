"""High-order optimality tests: the singular bracket test, the
second-order bang-bang test, and the variational derivatives that back
both with independent finite-difference cross-checks.

Bang-bang machinery. For a control with arcs of durations tau_1..tau_k
(generators alternating P = A + rB, Q = A - rB), define

    H_1 = P,  H_2 = Q,  H_i = V_i^{-1} M_i V_i,
    V_i = exp(tau_{i-1} M_{i-1}) ... exp(tau_2 M_2),

where M_i is the generator of arc i. A first-order extremal satisfies
q'(t_1) sum_i alpha_i H_i p(t_1) = 0 for every alpha with sum alpha_i = 0,
and on the subspace where additionally sum_i alpha_i H_i p(t_1) = 0 the
quadratic form

    r_k(alpha) = q'(t_1) sum_{i<j} alpha_i alpha_j [H_i, H_j] p(t_1)

must be <= 0; a positive value certifies the control as non-optimal.

Variational derivatives. Perturbing the arc durations to tau_i + s
alpha_i, the transition matrix C(T; s) satisfies at s = 0

    dC/ds  = C * S,                 S = sum_i alpha_i G_i,
    d2C/ds2 = C * (S^2 + sum_{i<j} alpha_i alpha_j [G_i, G_j]),

with G_i = exp(-tau_1 P) H_i exp(tau_1 P). The induced derivatives of the
spectral radius use the group inverse of (rho I - C).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import (NotSimple, PerronPair, expm, group_inverse, inverse,
                     lie_bracket, perron_pair, spectral_radius)
from .model import BangBangControl, Control, PBCSystem, transition_matrix

#: "rules out" tolerance for the restricted quadratic form, relative to
#: ||q(t1)|| * max ||[H_i, H_j]|| * ||p(t1)||.
SECOND_ORDER_RTOL = 1e-7

#: singular-value cutoff (relative to sigma_max) for the null-space basis.
NULLSPACE_RCOND = 1e-10


class TooFewArcs(ValueError):
    """Bang-bang machinery needs at least two arcs."""


class HorizonTooShort(ValueError):
    """The three-pulse variation does not fit inside [0, T]."""


# ---------------------------------------------------------------------------
# singular candidate (u == 0)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularTestResult:
    value: float      # w' [B, [B, A]] v
    scale: float
    verdict: str      # "passes" | "rules_out"
    rho: float


def singular_test(sys: PBCSystem, tol: float = 1e-9) -> SingularTestResult:
    """Bracket test for the constant control u == 0.

    A positive value of w' [B, [B, A]] v (Perron pair of exp(A T))
    certifies that u == 0 is not optimal.
    """
    pp = perron_pair(expm(sys.A * sys.T))
    if not pp.is_simple:
        raise NotSimple("Perron root of exp(A T) is not simple")
    bracket = lie_bracket(sys.B, lie_bracket(sys.B, sys.A))
    value = float(pp.w @ bracket @ pp.v)
    scale = max(np.linalg.norm(bracket, 2)
                * np.linalg.norm(pp.v) * np.linalg.norm(pp.w), 1e-300)
    verdict = "rules_out" if value > tol * scale else "passes"
    return SingularTestResult(value, scale, verdict, pp.rho)


def needle_variation_check(sys: PBCSystem, epsilons=None):
    """Independent check of the singular test by direct perturbation.

    Replaces the tail of u == 0 with a -1 / +1 / -1 pulse train of widths
    eps^(1/3), 2 eps^(1/3), eps^(1/3) and measures the true spectral-radius
    difference. The leading coefficient in eps is fitted with an
    eps + eps^(4/3) model and should equal (2/3) * rho * w'[B,[B,A]]v.

    Returns (fitted_slope, expected_slope, table) where table rows are
    (eps, rho(C(T, perturbed)) - rho(C(T, u==0))).
    """
    if epsilons is None:
        epsilons = np.geomspace(1e-6, 1e-4, 9)
    epsilons = np.asarray(sorted(float(e) for e in epsilons))
    if 4 * epsilons[-1] ** (1 / 3) > sys.T:
        raise HorizonTooShort("pulse train wider than the horizon")

    A, B, T = sys.A, sys.B, sys.T
    rho0 = spectral_radius(expm(A * T))
    diffs = []
    for eps in epsilons:
        d = eps ** (1 / 3)
        C = (expm((A - B) * d) @ expm((A + B) * 2 * d)
             @ expm((A - B) * d) @ expm(A * (T - 4 * d)))
        diffs.append(spectral_radius(C) - rho0)
    diffs = np.asarray(diffs)

    X = np.column_stack([epsilons, epsilons ** (4 / 3)])
    coef, *_ = np.linalg.lstsq(X, diffs, rcond=None)
    expected = (2.0 / 3.0) * rho0 * singular_test(sys).value
    return float(coef[0]), float(expected), list(zip(epsilons, diffs))


# ---------------------------------------------------------------------------
# bang-bang candidates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BangArcDecomposition:
    r: int
    P: np.ndarray              # A + rB
    Q: np.ndarray              # A - rB
    taus: tuple                # arc durations, sum = T
    H: tuple                   # H_1..H_k
    p1: np.ndarray             # p(t_1)
    q1: np.ndarray             # q(t_1)
    perron: PerronPair

    @property
    def k(self) -> int:
        return len(self.taus)

    def generators(self):
        """Per-arc generators M_1..M_k (alternating P, Q)."""
        return tuple(self.P if i % 2 == 0 else self.Q
                     for i in range(self.k))


def build_H(sys: PBCSystem, u: BangBangControl) -> BangArcDecomposition:
    """Arc decomposition with the conjugated matrices H_i and the adjoint
    evaluation vectors p(t_1), q(t_1)."""
    arcs = u.arcs(sys.T)
    if len(arcs) < 2:
        raise TooFewArcs("need a control with at least two bang arcs")
    taus = tuple(d for d, _ in arcs)
    P = sys.generator(u.r)
    Q = sys.generator(-u.r)

    pp = perron_pair(transition_matrix(sys, u))
    if not pp.is_simple:
        raise NotSimple("Perron root of C(T, u) is not simple")
    E1 = expm(P * taus[0])
    p1 = E1 @ pp.v
    # q(t1)' = w' C(T, t1), accumulated directly over arcs 2..k
    gens_tail = [P if i % 2 == 0 else Q for i in range(len(taus))][1:]
    Ctail = np.eye(sys.dim)
    for tau, M in zip(taus[1:], gens_tail):
        Ctail = expm(M * tau) @ Ctail
    q1 = pp.w @ Ctail

    gens = [P if i % 2 == 0 else Q for i in range(len(taus))]
    H = []
    V = np.eye(sys.dim)  # exp(tau_{i-1} M_{i-1}) ... exp(tau_2 M_2)
    for i, (tau, M) in enumerate(zip(taus, gens)):
        H.append(np.linalg.solve(V, M @ V))
        if i >= 1:
            V = expm(M * tau) @ V
    return BangArcDecomposition(u.r, P, Q, taus, tuple(H), p1, q1, pp)


def first_order_bang_residual(decomp: BangArcDecomposition) -> float:
    """max over a basis of {sum alpha_i = 0} of the normalized constraint
    |q'(t1) sum alpha_i H_i p(t1)|. Small at a first-order extremal."""
    scale = (np.linalg.norm(decomp.q1)
             * max(np.linalg.norm(H, 2) for H in decomp.H)
             * np.linalg.norm(decomp.p1))
    vals = [abs(decomp.q1 @ (decomp.H[j] - decomp.H[j + 1]) @ decomp.p1)
            for j in range(decomp.k - 1)]
    return float(max(vals) / scale)


def bang_quadratic_form(decomp: BangArcDecomposition, alpha,
                        p1=None, q1=None) -> float:
    """r_k(alpha) = q1' sum_{i<j} alpha_i alpha_j [H_i, H_j] p1.

    p1/q1 default to the decomposition's adjoint vectors; passing explicit
    vectors only rescales the (sign-invariant) result.
    """
    alpha = np.asarray(alpha, dtype=float)
    p1 = decomp.p1 if p1 is None else np.asarray(p1, dtype=float)
    q1 = decomp.q1 if q1 is None else np.asarray(q1, dtype=float)
    total = 0.0
    for i in range(decomp.k):
        for j in range(i + 1, decomp.k):
            if alpha[i] == 0.0 or alpha[j] == 0.0:
                continue
            total += (alpha[i] * alpha[j]
                      * (q1 @ lie_bracket(decomp.H[i], decomp.H[j]) @ p1))
    return float(total)


@dataclass(frozen=True)
class SecondOrderResult:
    first_order_residual: float
    constraint_basis: np.ndarray   # columns span {sum a_i = 0, sum a_i H_i p1 = 0}
    form_coeffs: np.ndarray        # strictly upper triangular c_ij
    restricted_max_eig: float
    scale: float
    verdict: str                   # "passes" | "rules_out" | "degenerate_Qk"


def second_order_test(decomp: BangArcDecomposition,
                      tol: float = SECOND_ORDER_RTOL) -> SecondOrderResult:
    """Second-order test for a bang-bang candidate.

    Restricts the quadratic form r_k to the constraint null space; a
    positive maximal eigenvalue there rules the candidate out. The verdict
    is degenerate_Qk when the constraint space is trivial.
    """
    k = decomp.k
    fo = first_order_bang_residual(decomp)

    constraints = np.vstack([
        np.ones((1, k)),
        np.column_stack([H @ decomp.p1 for H in decomp.H]),
    ])
    basis = scipy.linalg.null_space(constraints, rcond=NULLSPACE_RCOND)

    scale = (np.linalg.norm(decomp.q1) * np.linalg.norm(decomp.p1)
             * max(np.linalg.norm(lie_bracket(decomp.H[i], decomp.H[j]), 2)
                   for i in range(k) for j in range(i + 1, k)))
    coeffs = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            coeffs[i, j] = decomp.q1 @ lie_bracket(
                decomp.H[i], decomp.H[j]) @ decomp.p1

    if basis.shape[1] == 0:
        return SecondOrderResult(fo, basis, coeffs, 0.0, scale,
                                 "degenerate_Qk")

    sym = (coeffs + coeffs.T) / 2.0
    restricted = basis.T @ sym @ basis
    lam = float(np.max(np.linalg.eigvalsh(restricted)))
    verdict = "rules_out" if lam > tol * scale else "passes"
    return SecondOrderResult(fo, basis, coeffs, lam, scale, verdict)


# ---------------------------------------------------------------------------
# variational derivatives (the independent route to the same verdicts)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariationalDerivatives:
    alpha: np.ndarray
    dC: np.ndarray
    ddC: np.ndarray
    drho: float
    ddrho: float


def perturbed_transition(sys: PBCSystem, u: BangBangControl, alpha,
                         s: float) -> np.ndarray:
    """Transition matrix rebuilt from perturbed arc durations
    tau_i + s alpha_i (finite-difference oracle target)."""
    arcs = u.arcs(sys.T)
    alpha = np.asarray(alpha, dtype=float)
    C = np.eye(sys.dim)
    for (tau, val), a in zip(arcs, alpha):
        C = expm(sys.generator(val) * (tau + s * a)) @ C
    return C


def transition_derivatives(sys: PBCSystem, u: BangBangControl, alpha):
    """(dC, ddC): first/second derivative of the perturbed transition
    matrix at s = 0 for a duration perturbation alpha with sum = 0."""
    alpha = np.asarray(alpha, dtype=float)
    decomp = build_H(sys, u)
    if len(alpha) != decomp.k:
        raise ValueError(f"alpha must have length {decomp.k}")
    if abs(alpha.sum()) > 1e-9 * max(1.0, np.max(np.abs(alpha))):
        raise ValueError("perturbation must preserve the horizon: sum alpha = 0")

    E1 = expm(decomp.P * decomp.taus[0])
    E1inv = inverse(E1)
    G = [E1inv @ H @ E1 for H in decomp.H]

    C = transition_matrix(sys, u)
    S = sum(a * Gi for a, Gi in zip(alpha, G))
    dC = C @ S
    comm = np.zeros_like(C)
    for i in range(decomp.k):
        for j in range(i + 1, decomp.k):
            comm += alpha[i] * alpha[j] * lie_bracket(G[i], G[j])
    ddC = C @ (S @ S + comm)
    return dC, ddC


def spectral_radius_derivatives(C, pp: PerronPair, dC, ddC):
    """(drho, ddrho): derivatives of the simple dominant eigenvalue of
    C + s dC + (s^2/2) ddC + ... at s = 0."""
    if not pp.is_simple:
        raise NotSimple("spectral radius is not a simple eigenvalue")
    C = np.asarray(C, dtype=float)
    drho = float(pp.w @ dC @ pp.v)
    D = pp.rho * np.eye(C.shape[0]) - C
    Dsharp = group_inverse(D, pp.v, pp.w)
    ddrho = float(pp.w @ ddC @ pp.v + 2.0 * (pp.w @ dC @ Dsharp @ dC @ pp.v))
    return drho, ddrho


def variational_derivatives(sys: PBCSystem, u: BangBangControl,
                            alpha) -> VariationalDerivatives:
    """Bundle of transition-matrix and spectral-radius derivatives for a
    horizon-preserving switching-time perturbation."""
    dC, ddC = transition_derivatives(sys, u, alpha)
    C = transition_matrix(sys, u)
    pp = perron_pair(C)
    drho, ddrho = spectral_radius_derivatives(C, pp, dC, ddC)
    return VariationalDerivatives(np.asarray(alpha, dtype=float),
                                  dC, ddC, drho, ddrho)


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def singular_result_to_dict(res: SingularTestResult) -> dict:
    return {"test": "singular", "value": res.value, "scale": res.scale,
            "rho": res.rho, "verdict": res.verdict}


def second_order_result_to_dict(res: SecondOrderResult) -> dict:
    return {
        "test": "second_order_bangbang",
        "first_order_residual": res.first_order_residual,
        "constraint_space_dim": int(res.constraint_basis.shape[1]),
        "form_coeffs": res.form_coeffs.tolist(),
        "restricted_max_eig": res.restricted_max_eig,
        "scale": res.scale,
        "verdict": res.verdict,
    }
