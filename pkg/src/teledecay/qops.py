"""Dense matrix kernels for 1-3 qubit density matrices.

Qubits are labelled 1, 2, 3 from the top wire down; qubit 1 is the most
significant bit of a computational-basis index, so ``|q1 q2 q3>`` sits at
index ``4*q1 + 2*q2 + q3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_QUBITS = 3

TRACE_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = -1e-10
UNITARY_TOL = 1e-10

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
# decay target is |0>
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_PLUS = SIGMA_MINUS.T.copy()

CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)


class NonUnitaryError(ValueError):
    """Raised when a matrix handed to :func:`apply_unitary` is not unitary."""


@dataclass(frozen=True)
class BlochAngles:
    """Polar angle ``theta`` in [0, pi] and azimuth ``phi`` in [0, 2pi]."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not (0.0 <= self.phi <= 2.0 * math.pi):
            raise ValueError(f"phi must lie in [0, 2pi], got {self.phi!r}")

    def amplitudes(self) -> tuple[complex, complex]:
        a = math.cos(self.theta / 2) * np.exp(0.5j * self.phi)
        b = math.sin(self.theta / 2) * np.exp(-0.5j * self.phi)
        return complex(a), complex(b)

    def ket(self) -> np.ndarray:
        return np.array(self.amplitudes(), dtype=np.complex128)


def num_qubits(mat: np.ndarray) -> int:
    """Number of qubits of a square ``2**n`` matrix, n in 1..3."""
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    n = mat.shape[0].bit_length() - 1
    if mat.shape[0] != 1 << n or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"dimension {mat.shape[0]} is not 2, 4 or 8")
    return n


def density_violations(rho: np.ndarray) -> dict[str, float]:
    """Return the trace, Hermiticity and positivity defects of ``rho``."""
    rho = np.asarray(rho)
    return {
        "trace": abs(np.trace(rho) - 1.0),
        "hermitian": float(np.max(np.abs(rho - rho.conj().T))),
        "min_eigenvalue": float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)))),
    }


def is_density_matrix(rho: np.ndarray) -> bool:
    v = density_violations(rho)
    return (
        v["trace"] <= TRACE_TOL
        and v["hermitian"] <= HERMITIAN_TOL
        and v["min_eigenvalue"] >= PSD_TOL
    )


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate ``rho`` as a 1-3 qubit density matrix and return it as complex128.

    Raises:
        ValueError: on wrong shape, trace, Hermiticity or a negative eigenvalue
            below ``PSD_TOL``.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    num_qubits(rho)
    v = density_violations(rho)
    if v["trace"] > TRACE_TOL:
        raise ValueError(f"trace deviates from 1 by {v['trace']:.3e}")
    if v["hermitian"] > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max defect {v['hermitian']:.3e})")
    if v["min_eigenvalue"] < PSD_TOL:
        raise ValueError(f"matrix is not PSD (min eigenvalue {v['min_eigenvalue']:.3e})")
    return rho


def bloch_pure_state(angles: BlochAngles) -> np.ndarray:
    """Projector onto ``cos(theta/2) e^{i phi/2}|0> + sin(theta/2) e^{-i phi/2}|1>``."""
    psi = angles.ket()
    return np.outer(psi, psi.conj())


def bell_phi_plus() -> np.ndarray:
    """``|Phi+><Phi+|`` with ``|Phi+> = (|00> + |11>)/sqrt(2)``, entries exact."""
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[np.ix_([0, 3], [0, 3])] = 0.5
    return rho


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; ``a`` occupies the lower-numbered qubits."""
    if num_qubits(a) + num_qubits(b) > MAX_QUBITS:
        raise ValueError(
            f"tensor product would have {num_qubits(a) + num_qubits(b)} qubits "
            f"(max {MAX_QUBITS})"
        )
    return np.kron(a, b)


def is_unitary(u: np.ndarray, atol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=atol
    )


def apply_unitary(state: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Return ``U rho U^+``.

    Raises:
        NonUnitaryError: if ``U^+ U`` differs from the identity by more than
            ``UNITARY_TOL`` in any entry.
        ValueError: on a dimension mismatch.
    """
    state = np.asarray(state, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != state.shape:
        raise ValueError(f"unitary shape {u.shape} does not match state {state.shape}")
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if defect > UNITARY_TOL:
        raise NonUnitaryError(f"matrix is not unitary: max |U^+U - I| = {defect:.3e}")
    return u @ state @ u.conj().T


def _check_qubits(qubits: Sequence[int], n: int, what: str) -> list[int]:
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated {what} qubit in {qubits}")
    for q in qubits:
        if not 1 <= q <= n:
            raise ValueError(f"{what} qubit {q} outside 1..{n}")
    return qubits


def embed_gate(gate: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Lift a k-qubit ``gate`` acting on ``targets`` to the full n-qubit space.

    ``targets[0]`` is the gate's most significant qubit; all other qubits
    see the identity.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in 1..{MAX_QUBITS}, got {n}")
    targets = _check_qubits(targets, n, "target")
    gate = np.asarray(gate, dtype=np.complex128)
    k = len(targets)
    if gate.shape != (1 << k, 1 << k):
        raise ValueError(f"gate shape {gate.shape} does not act on {k} qubit(s)")
    shifts = [n - q for q in targets]
    target_mask = sum(1 << s for s in shifts)

    def sub_index(idx):
        out = 0
        for s in shifts:
            out = (out << 1) | ((idx >> s) & 1)
        return out

    d = 1 << n
    full = np.zeros((d, d), dtype=np.complex128)
    for row in range(d):
        for col in range(d):
            if (row & ~target_mask) == (col & ~target_mask):
                full[row, col] = gate[sub_index(row), sub_index(col)]
    return full


def partial_trace(state: np.ndarray, drop: Sequence[int]) -> np.ndarray:
    """Trace out the qubits in ``drop`` (1-based labels, qubit 1 most significant)."""
    state = np.asarray(state, dtype=np.complex128)
    n = num_qubits(state)
    drop = _check_qubits(drop, n, "traced")
    if not drop:
        raise ValueError("drop must name at least one qubit")
    if len(drop) >= n:
        raise ValueError("partial trace must keep at least one qubit")
    keep = [q for q in range(1, n + 1) if q not in drop]
    t = state.reshape((2,) * (2 * n))
    # row axes 0..n-1, column axes n..2n-1; traced pairs share a label
    row = list(range(n))
    col = [n + i if (i + 1) in keep else i for i in range(n)]
    out_axes = [q - 1 for q in keep] + [n + q - 1 for q in keep]
    d = 1 << len(keep)
    return np.einsum(t, row + col, out_axes).reshape(d, d)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of ``a - b`` for Hermitian arguments."""
    diff = np.asarray(a) - np.asarray(b)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
