"""One-qubit teleportation through a decohered register.

The environment acts on ``rho_in (x) |Phi+><Phi+|`` for the whole interval,
then the noiseless circuit ``CZ_13 CX_23 H_1 CX_12`` runs and qubits 1 and 2
are traced out (measurements deferred into controlled corrections).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from teledecay import channels
from teledecay.channels import EnvironmentKind
from teledecay.qops import (
    CX,
    CZ,
    H,
    X,
    Z,
    BlochAngles,
    apply_unitary,
    bell_phi_plus,
    bloch_pure_state,
    embed_gate,
    partial_trace,
    tensor,
)

CLASSICAL_BOUND = 2.0 / 3.0


class Method(enum.Enum):
    KRAUS = "kraus"
    ODE = "ode"

    @classmethod
    def parse(cls, text: "str | Method") -> "Method":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise ValueError(f"unknown method {text!r}; expected 'kraus' or 'ode'") from None


@dataclass(frozen=True)
class TeleportSpec:
    kind: EnvironmentKind
    case: int
    gamma_t: float
    method: Method = Method.KRAUS
    ode_step: float = channels.DEFAULT_ODE_STEP

    def __post_init__(self):
        object.__setattr__(self, "kind", EnvironmentKind.parse(self.kind))
        object.__setattr__(self, "case", channels.check_case(self.case))
        object.__setattr__(self, "gamma_t", channels.check_time(self.gamma_t))
        object.__setattr__(self, "method", Method.parse(self.method))
        if self.method is Method.ODE and not self.ode_step > 0:
            raise ValueError(f"ode_step must be positive, got {self.ode_step!r}")

    def at(self, gamma_t: float) -> "TeleportSpec":
        return TeleportSpec(self.kind, self.case, gamma_t, self.method, self.ode_step)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre nodes in cos(theta) times uniform nodes in phi.

    The fidelity of any linear channel is a degree-2 trigonometric
    polynomial on the sphere, so the floors below already integrate exactly.
    """

    n_theta: int = 8
    n_phi: int = 16

    def __post_init__(self):
        if int(self.n_theta) != self.n_theta or self.n_theta < 4:
            raise ValueError(f"n_theta must be an integer >= 4, got {self.n_theta!r}")
        if int(self.n_phi) != self.n_phi or self.n_phi < 8:
            raise ValueError(f"n_phi must be an integer >= 8, got {self.n_phi!r}")


@lru_cache(maxsize=1)
def _u_tel() -> np.ndarray:
    u = embed_gate(CX, [1, 2], 3)
    u = embed_gate(H, [1], 3) @ u
    u = embed_gate(CX, [2, 3], 3) @ u
    u = embed_gate(CZ, [1, 3], 3) @ u
    u.setflags(write=False)
    return u


def u_tel() -> np.ndarray:
    """The 8x8 circuit unitary, ``CX_12`` applied first."""
    return _u_tel().copy()


def evolve(state: np.ndarray, spec: TeleportSpec) -> np.ndarray:
    """Apply the decoherence stage of ``spec`` to a 3-qubit (or 2-qubit) state."""
    if spec.method is Method.ODE:
        return channels.evolve_ode(state, spec.kind, spec.case, spec.gamma_t, spec.ode_step)
    return channels.evolve_kraus(state, spec.kind, spec.case, spec.gamma_t)


def teleport_output(angles: BlochAngles, spec: TeleportSpec) -> np.ndarray:
    """Bob's reduced state after teleporting the pure state at ``angles``."""
    state = tensor(bloch_pure_state(angles), bell_phi_plus())
    state = evolve(state, spec)
    state = apply_unitary(state, _u_tel())
    return partial_trace(state, [1, 2])


def fidelity(angles: BlochAngles, output: np.ndarray) -> float:
    """``<psi|rho_out|psi>`` for the input pure state, clipped to [0, 1]."""
    psi = angles.ket()
    value = complex(psi.conj() @ np.asarray(output) @ psi)
    if abs(value.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {value.imag:.3e}; output not Hermitian")
    return min(1.0, max(0.0, value.real))


# Pure inputs with Bloch vectors +z, -z, +x, +y; with the e^{-i phi/2}
# convention on b the +y state sits at phi = 3pi/2.
_BASIS_ANGLES = (
    BlochAngles(0.0, 0.0),
    BlochAngles(math.pi, 0.0),
    BlochAngles(math.pi / 2, 0.0),
    BlochAngles(math.pi / 2, 3 * math.pi / 2),
)


def teleportation_images(spec: TeleportSpec) -> np.ndarray:
    """Outputs for the four basis inputs, shape (4, 2, 2).

    The whole pipeline is real-linear in the Hermitian input (RK4 steps and
    re-Hermitization included), so any input Bloch vector ``(x, y, z)`` maps
    to ``c0*O_z + c1*O_-z + x*O_x + y*O_y`` with
    ``c0 = (1 + z - x - y)/2`` and ``c1 = (1 - z - x - y)/2``.
    """
    return np.array([teleport_output(a, spec) for a in _BASIS_ANGLES])


def outputs_from_images(images: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Vectorised outputs for arrays of angles, shape (..., 2, 2)."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    # Bloch vector of cos(t/2)e^{ip/2}|0> + sin(t/2)e^{-ip/2}|1>
    x = np.sin(theta) * np.cos(phi)
    y = -np.sin(theta) * np.sin(phi)
    z = np.cos(theta)
    c0 = 0.5 * (1 + z - x - y)
    c1 = 0.5 * (1 - z - x - y)
    coeffs = np.stack([c0, c1, x, y], axis=-1)
    return np.einsum("...k,kij->...ij", coeffs, images)


def _fidelities(images, theta, phi):
    rho = outputs_from_images(images, theta, phi)
    a = np.cos(theta / 2) * np.exp(0.5j * phi)
    b = np.sin(theta / 2) * np.exp(-0.5j * phi)
    psi = np.stack(np.broadcast_arrays(a, b), axis=-1)
    return np.real(np.einsum("...i,...ij,...j->...", psi.conj(), rho, psi))


def quadrature_nodes(quad: QuadratureSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angles and weights (summing to 1) of the product rule."""
    u, w_u = np.polynomial.legendre.leggauss(quad.n_theta)
    phi = 2 * math.pi * np.arange(quad.n_phi) / quad.n_phi
    theta = np.arccos(u)
    weights = np.outer(w_u / 2, np.full(quad.n_phi, 1.0 / quad.n_phi))
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    return th, ph, weights


def average_fidelity(spec: TeleportSpec, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Fidelity averaged uniformly over the Bloch sphere by product quadrature."""
    theta, phi, weights = quadrature_nodes(quad)
    f = _fidelities(teleportation_images(spec), theta, phi)
    # fixed-order reduction keeps results bit-stable
    return float(np.sum(weights * f))


SIX_STATES = (
    BlochAngles(0.0, 0.0),
    BlochAngles(math.pi, 0.0),
    BlochAngles(math.pi / 2, 0.0),
    BlochAngles(math.pi / 2, math.pi),
    BlochAngles(math.pi / 2, math.pi / 2),
    BlochAngles(math.pi / 2, 3 * math.pi / 2),
)


def average_fidelity_six_state(spec: TeleportSpec) -> float:
    """Mean fidelity over the six Pauli eigenstates (a spherical 2-design)."""
    return sum(fidelity(a, teleport_output(a, spec)) for a in SIX_STATES) / 6.0


def measure_and_correct_output(angles: BlochAngles, spec: TeleportSpec) -> np.ndarray:
    """Explicit four-outcome protocol; cross-check for :func:`teleport_output`.

    Alice applies ``CX_12`` then ``H_1``, measures qubits 1 and 2 in the
    computational basis, and Bob applies ``Z^m1 X^m2`` for outcome
    ``(m1, m2)``. Outcomes are averaged with their probabilities.
    """
    state = np.kron(bloch_pure_state(angles), bell_phi_plus())
    state = evolve(state, spec)
    eye2 = np.eye(2)
    pre = np.kron(np.kron(H, eye2), eye2) @ np.kron(CX, eye2)
    state = pre @ state @ pre.conj().T
    out = np.zeros((2, 2), dtype=np.complex128)
    for m1 in (0, 1):
        for m2 in (0, 1):
            # rows/cols of qubit 3 for Alice's outcome (m1, m2)
            idx = [4 * m1 + 2 * m2, 4 * m1 + 2 * m2 + 1]
            branch = state[np.ix_(idx, idx)]
            fix = np.linalg.matrix_power(Z, m1) @ np.linalg.matrix_power(X, m2)
            out += fix @ branch @ fix.conj().T
    return out
