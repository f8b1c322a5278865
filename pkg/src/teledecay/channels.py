"""Markovian decoherence of selected qubits: Lindblad ODE and exact Kraus maps.

Time is always the dimensionless product ``gamma_t``; a decohered qubit has
unit rate, an untouched qubit rate zero.
"""
from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from teledecay import kernels
from teledecay.qops import MAX_QUBITS, SIGMA_MINUS, SIGMA_PLUS, embed_gate, num_qubits

DEFAULT_ODE_STEP = 1e-3


class EnvironmentKind(enum.Enum):
    DISSIPATIVE = "di"
    NOISY = "no"
    DEPHASING = "de"

    @classmethod
    def parse(cls, text: "str | EnvironmentKind") -> "EnvironmentKind":
        """Accept a member, its short code (``di``/``no``/``de``) or its name."""
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown environment kind {text!r}")

    @property
    def code(self) -> str:
        return self.value


# decohered qubits per case, 1-based labels on the 3-qubit register
CASE_QUBITS = {1: (2, 3), 2: (3,), 3: (1, 2)}
CASES = tuple(CASE_QUBITS)


def check_case(case: int) -> int:
    if isinstance(case, bool) or int(case) != case or int(case) not in CASE_QUBITS:
        raise ValueError(f"decoherence case must be 1, 2 or 3, got {case!r}")
    return int(case)


def check_time(gamma_t: float) -> float:
    gamma_t = float(gamma_t)
    if not gamma_t >= 0.0:
        raise ValueError(f"gamma_t must be nonnegative, got {gamma_t!r}")
    return gamma_t


def generators(kind: EnvironmentKind) -> list[np.ndarray]:
    """Single-qubit Lindblad operators for ``kind``."""
    kind = EnvironmentKind.parse(kind)
    if kind is EnvironmentKind.DISSIPATIVE:
        return [SIGMA_MINUS]
    if kind is EnvironmentKind.NOISY:
        return [SIGMA_MINUS, SIGMA_PLUS]
    return [SIGMA_PLUS @ SIGMA_MINUS]


def case_qubits(case: int, n_qubits: int = MAX_QUBITS) -> tuple[int, ...]:
    """Decohered qubits of ``case`` for a state on the trailing ``n_qubits`` wires.

    A 2-qubit state is read as wires 2 and 3 (the shared pair), so case 3
    decoheres only its first qubit. Labels returned are local to the state.

    Raises:
        ValueError: if none of the case's wires belong to the state.
    """
    case = check_case(case)
    offset = MAX_QUBITS - n_qubits
    local = tuple(q - offset for q in CASE_QUBITS[case] if q > offset)
    if not local:
        raise ValueError(
            f"case {case} decoheres wires {CASE_QUBITS[case]}, none of which lie "
            f"on a {n_qubits}-qubit state (wires {offset + 1}..{MAX_QUBITS})"
        )
    return local


def case_rates(case: int, n_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Per-qubit coupling rates (1 on decohered qubits, 0 elsewhere)."""
    rates = np.zeros(n_qubits)
    for q in case_qubits(case, n_qubits):
        rates[q - 1] = 1.0
    return rates


def _full_jumps(kind, rates, n):
    ops, gammas = [], []
    for q in range(1, n + 1):
        for op in generators(kind):
            ops.append(embed_gate(op, [q], n))
            gammas.append(rates[q - 1])
    return np.array(ops), np.array(gammas, dtype=np.float64)


def lindblad_rhs(state: np.ndarray, kind: EnvironmentKind, rates: Sequence[float]) -> np.ndarray:
    """Right-hand side of the master equation with one rate per qubit.

    Each qubit ``k`` contributes ``(g_k/2)(2 L rho L^+ - {L^+ L, rho})`` for
    every generator ``L`` of ``kind``.
    """
    state = np.asarray(state, dtype=np.complex128)
    n = num_qubits(state)
    rates = np.asarray(rates, dtype=np.float64)
    if rates.shape != (n,):
        raise ValueError(f"need {n} rates, got shape {rates.shape}")
    if np.any(rates < 0):
        raise ValueError(f"rates must be nonnegative, got {rates.tolist()}")
    jumps, gammas = _full_jumps(kind, rates, n)
    return kernels.lindblad_rhs(state, jumps, gammas)


def ode_steps(gamma_t: float, step: float) -> int:
    """Number of equal RK4 steps of size at most ``step`` covering ``gamma_t``."""
    return math.ceil(gamma_t / step - 1e-9) if gamma_t > 0 else 0


def evolve_ode(
    state: np.ndarray,
    kind: EnvironmentKind,
    case: int,
    gamma_t: float,
    step: float = DEFAULT_ODE_STEP,
) -> np.ndarray:
    """Integrate the master equation with fixed-step RK4.

    The interval is split into ``ceil(gamma_t / step)`` equal steps so the
    final time is hit exactly.
    """
    if not step > 0:
        raise ValueError(f"ODE step must be positive, got {step!r}")
    gamma_t = check_time(gamma_t)
    state = np.asarray(state, dtype=np.complex128)
    n = num_qubits(state)
    jumps, gammas = _full_jumps(kind, case_rates(case, n), n)
    return kernels.rk4_lindblad(state, jumps, gammas, gamma_t, ode_steps(gamma_t, step))


def kraus_single(kind: EnvironmentKind, gamma_t: float) -> np.ndarray:
    """Exact single-qubit Kraus operators after time ``gamma_t``, shape (k, 2, 2)."""
    kind = EnvironmentKind.parse(kind)
    gamma_t = check_time(gamma_t)
    if kind is EnvironmentKind.DISSIPATIVE:
        p = -math.expm1(-gamma_t)
        return np.array(
            [[[1, 0], [0, math.exp(-gamma_t / 2)]], [[0, math.sqrt(p)], [0, 0]]],
            dtype=np.complex128,
        )
    if kind is EnvironmentKind.DEPHASING:
        lam = -math.expm1(-gamma_t)
        return np.array(
            [[[1, 0], [0, math.exp(-gamma_t / 2)]], [[0, 0], [0, math.sqrt(lam)]]],
            dtype=np.complex128,
        )
    # equal-weight mixture of damping toward |0> and toward |1>
    q = -math.expm1(-2 * gamma_t)
    keep = math.exp(-gamma_t)  # sqrt(1 - q)
    s = math.sqrt(q)
    return np.array(
        [
            [[1, 0], [0, keep]],
            [[0, s], [0, 0]],
            [[keep, 0], [0, 1]],
            [[0, 0], [s, 0]],
        ],
        dtype=np.complex128,
    ) / math.sqrt(2)


def apply_kraus(state: np.ndarray, kraus: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply the same single-qubit Kraus set independently to each of ``qubits``."""
    state = np.asarray(state, dtype=np.complex128)
    n = num_qubits(state)
    for q in qubits:
        state = kernels.apply_local_kraus(state, kraus, q - 1, n)
    return state


def evolve_kraus(state: np.ndarray, kind: EnvironmentKind, case: int, gamma_t: float) -> np.ndarray:
    """Exact evolution of ``state`` for time ``gamma_t`` under ``case`` couplings."""
    state = np.asarray(state, dtype=np.complex128)
    qubits = case_qubits(case, num_qubits(state))
    return apply_kraus(state, kraus_single(kind, gamma_t), qubits)
