"""Teleportation of a one-qubit state through dissipative, noisy and dephasing environments.

Submodules: ``qops`` (matrix kernels), ``channels`` (Lindblad/Kraus
evolution), ``teleport`` (protocol and fidelities), ``metrics``
(concurrence, purity, closed forms), ``analysis`` (critical times and
crossings), ``sweep``/``cli`` (grid output and command line).
"""
from teledecay.analysis import (
    Curve,
    NoFiniteRoot,
    RootResult,
    Source,
    classical_fidelity_bound,
    find_critical_time,
    find_crossing,
    find_esd_time,
    verify_reference_constants,
)
from teledecay.channels import EnvironmentKind, evolve_kraus, evolve_ode, kraus_single, lindblad_rhs
from teledecay.kernels import BACKEND
from teledecay.metrics import (
    analytic_concurrence,
    analytic_favg,
    analytic_purity,
    channel_state,
    concurrence,
    purity,
)
from teledecay.qops import BlochAngles, bell_phi_plus, bloch_pure_state, partial_trace, tensor
from teledecay.teleport import (
    Method,
    QuadratureSpec,
    TeleportSpec,
    average_fidelity,
    average_fidelity_six_state,
    fidelity,
    teleport_output,
    u_tel,
)

__version__ = "0.1.0"
