"""Pure numpy implementations of the hot kernels.

Mirrors the signatures in ``_ckernels.pyx`` exactly; selected by
:mod:`teledecay.kernels` when the compiled module is unavailable.
"""
import numpy as np


def lindblad_rhs(rho, jumps, rates):
    """Dissipator sum_k (g_k/2)(2 L rho L^+ - {L^+ L, rho}) for full-space jumps."""
    rho = np.asarray(rho, dtype=np.complex128)
    jumps = np.asarray(jumps, dtype=np.complex128)
    rates = np.asarray(rates, dtype=np.float64)
    out = np.zeros_like(rho)
    for g, op in zip(rates, jumps):
        if g == 0.0:
            continue
        op_dag = op.conj().T
        decay = op_dag @ op
        out += g * (op @ rho @ op_dag) - 0.5 * g * (decay @ rho + rho @ decay)
    return out


def rk4_lindblad(rho0, jumps, rates, t_end, n_steps):
    """Classical RK4 from 0 to ``t_end`` in ``n_steps`` equal steps.

    The state is re-Hermitized after every step.
    """
    rho = np.array(rho0, dtype=np.complex128, copy=True)
    if n_steps <= 0:
        return rho
    jumps = np.asarray(jumps, dtype=np.complex128)
    rates = np.asarray(rates, dtype=np.float64)
    keep = rates != 0.0
    jumps, rates = jumps[keep], rates[keep]
    if len(rates) == 0:
        return rho
    jumps_dag = jumps.conj().transpose(0, 2, 1)
    g = rates[:, None, None]
    # anticommutator part collapses into one effective matrix
    decay = 0.5 * np.sum(g * (jumps_dag @ jumps), axis=0)

    def rhs(r):
        return np.sum(g * (jumps @ r @ jumps_dag), axis=0) - decay @ r - r @ decay

    h = t_end / n_steps
    for _ in range(n_steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h * k1)
        k3 = rhs(rho + 0.5 * h * k2)
        k4 = rhs(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
    return rho


def apply_local_kraus(rho, kraus, qubit, n_qubits):
    """Apply a single-qubit Kraus set to ``qubit`` (0-based, most significant first)."""
    rho = np.asarray(rho, dtype=np.complex128)
    kraus = np.asarray(kraus, dtype=np.complex128)
    left = 1 << qubit
    right = 1 << (n_qubits - qubit - 1)
    d = left * 2 * right
    r = rho.reshape(left, 2, right, left, 2, right)
    out = np.einsum("kab,ibjlcm,kdc->iajldm", kraus, r, kraus.conj(), optimize=True)
    return out.reshape(d, d)
