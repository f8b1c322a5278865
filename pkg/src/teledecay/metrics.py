"""Concurrence and purity of the shared pair, with closed-form references.

The closed forms are functions of ``gamma_t`` for each environment kind and
decoherence case; numeric counterparts come from evolving |Phi+> directly.
"""
from __future__ import annotations

import math

import numpy as np

from teledecay import channels
from teledecay.channels import EnvironmentKind
from teledecay.qops import PSD_TOL, Y, bell_phi_plus, num_qubits

_SPIN_FLIP = np.kron(Y, Y)
_E = EnvironmentKind
_ROUNDOFF = 16 * np.finfo(float).eps


def concurrence(state: np.ndarray) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)`` of a two-qubit state.

    The ``l_i`` (square roots of the eigenvalues of ``rho S rho* S`` with
    ``S = sy (x) sy``) are obtained as singular values of ``W^T S W`` where
    ``rho = W W^+``. Taking square roots of near-zero eigenvalues instead
    amplifies roundoff to ~1e-9 near rank-deficient states, which is where
    every single-qubit damping channel leaves the pair.
    """
    state = np.asarray(state, dtype=np.complex128)
    if num_qubits(state) != 2:
        raise ValueError(f"concurrence needs a 2-qubit state, got shape {state.shape}")
    p, v = np.linalg.eigh(0.5 * (state + state.conj().T))
    if p.min() < PSD_TOL:
        raise ValueError(f"state has eigenvalue {p.min():.3e}; not positive semidefinite")
    # roundoff-level eigenvalues are zero; their square roots (~1e-8) would
    # otherwise leak into the l_i
    p[p <= _ROUNDOFF * p.max()] = 0.0
    w = v * np.sqrt(p)
    lam = np.linalg.svd(w.T @ _SPIN_FLIP @ w, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def purity(state: np.ndarray) -> float:
    """``Tr(rho^2)``."""
    state = np.asarray(state)
    return float(np.real(np.einsum("ij,ji->", state, state)))


def channel_state(
    kind: EnvironmentKind, case: int, gamma_t: float, method: str = "kraus", ode_step: float = 1e-3
) -> np.ndarray:
    """|Phi+> on wires 2 and 3 after decoherence of the case's channel qubits.

    Case 1 decoheres both qubits, case 2 the second, case 3 the first.
    """
    rho = bell_phi_plus()
    if str(getattr(method, "value", method)).lower() == "ode":
        return channels.evolve_ode(rho, kind, case, gamma_t, ode_step)
    return channels.evolve_kraus(rho, kind, case, gamma_t)


def _key(kind, case, gamma_t):
    return EnvironmentKind.parse(kind), channels.check_case(case), channels.check_time(gamma_t)


def analytic_favg(kind: EnvironmentKind, case: int, gamma_t: float) -> float:
    """Closed-form average teleportation fidelity."""
    return 2.0 / 3.0 + analytic_favg_excess(kind, case, gamma_t)


def analytic_favg_excess(kind: EnvironmentKind, case: int, gamma_t: float) -> float:
    """Closed-form average fidelity minus 2/3, evaluated without cancellation.

    Keeps the sign of ``F_av - 2/3`` resolvable when the excess is far below
    double-precision resolution of 2/3 (e.g. ``e^{-100}/3``).
    """
    kind, case, t = _key(kind, case, gamma_t)
    e = math.exp
    if kind is _E.DISSIPATIVE:
        if case == 1:
            return e(-2 * t) / 3
        if case == 2:
            return -1 / 6 + e(-t / 2) / 3 + e(-t) / 6
        return -1 / 6 + e(-t) / 3 + e(-2 * t) / 6
    if kind is _E.NOISY:
        if case == 2:
            return -1 / 6 + e(-t) / 3 + e(-2 * t) / 6
        return -1 / 6 + e(-2 * t) / 3 + e(-4 * t) / 6
    if case == 2:
        return e(-t / 2) / 3
    return e(-t) / 3


def noisy_concurrence_inner(case: int, gamma_t: float) -> float:
    """The smooth expression whose positive part is the noisy-case concurrence."""
    case, t = channels.check_case(case), float(gamma_t)
    x = math.exp(-2 * t) if case == 1 else math.exp(-t)
    return x + x * x / 2 - 0.5


def analytic_concurrence(kind: EnvironmentKind, case: int, gamma_t: float) -> float:
    kind, case, t = _key(kind, case, gamma_t)
    if kind is _E.NOISY:
        return max(noisy_concurrence_inner(case, t), 0.0)
    if kind is _E.DISSIPATIVE and case == 1:
        return math.exp(-2 * t)
    if kind is _E.DEPHASING and case == 1:
        return math.exp(-t)
    return math.exp(-t / 2)


def analytic_purity(kind: EnvironmentKind, case: int, gamma_t: float) -> float:
    kind, case, t = _key(kind, case, gamma_t)
    x = math.exp(-t)
    if kind is _E.DISSIPATIVE:
        if case == 1:
            return 1 - 2 * x + 3 * x**2 - 2 * x**3 + x**4
        return 0.5 + x**2 / 2
    if kind is _E.NOISY:
        y = x**2 if case == 1 else x
        return 0.25 + y**2 / 2 + y**4 / 4
    if case == 1:
        return 0.5 + x**2 / 2
    return 0.5 + x / 2
