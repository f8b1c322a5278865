import math

import numpy as np
import pytest
import scipy.linalg

from teledecay.channels import (
    CASE_QUBITS,
    EnvironmentKind,
    case_qubits,
    case_rates,
    evolve_kraus,
    evolve_ode,
    generators,
    kraus_single,
    lindblad_rhs,
    ode_steps,
)
from teledecay.qops import I2, BlochAngles, bell_phi_plus, bloch_pure_state, is_density_matrix, tensor, trace_distance

from conftest import random_density

KINDS = list(EnvironmentKind)
DI, NO, DE = EnvironmentKind.DISSIPATIVE, EnvironmentKind.NOISY, EnvironmentKind.DEPHASING
PLUS = np.full((2, 2), 0.5, dtype=complex)
ONE = np.diag([0, 1]).astype(complex)


def liouvillian(kind):
    """Column-stacking superoperator of the single-qubit master equation, unit rate."""
    eye = np.eye(2)
    sup = np.zeros((4, 4), dtype=complex)
    for L in generators(kind):
        LdL = L.conj().T @ L
        sup += np.kron(L.conj(), L) - 0.5 * np.kron(eye, LdL) - 0.5 * np.kron(LdL.T, eye)
    return sup


def test_parse_kind():
    assert EnvironmentKind.parse("di") is DI
    assert EnvironmentKind.parse("Noisy") is NO
    assert EnvironmentKind.parse(DE) is DE
    with pytest.raises(ValueError):
        EnvironmentKind.parse("thermal")


def test_generators_convention():
    (lo,) = generators(DI)
    np.testing.assert_array_equal(lo, [[0, 1], [0, 0]])
    (deph,) = generators(DE)
    np.testing.assert_array_equal(deph, np.diag([0, 1]))
    assert len(generators(NO)) == 2


def test_case_mapping():
    assert CASE_QUBITS == {1: (2, 3), 2: (3,), 3: (1, 2)}
    np.testing.assert_array_equal(case_rates(1), [0, 1, 1])
    np.testing.assert_array_equal(case_rates(2), [0, 0, 1])
    np.testing.assert_array_equal(case_rates(3), [1, 1, 0])
    # a 2-qubit state sits on wires 2 and 3
    assert case_qubits(1, 2) == (1, 2)
    assert case_qubits(2, 2) == (2,)
    assert case_qubits(3, 2) == (1,)
    with pytest.raises(ValueError, match="none of which"):
        case_qubits(3, 1)
    with pytest.raises(ValueError):
        case_qubits(4)


def test_rhs_zero_rates(rng):
    rho = random_density(rng, 3)
    np.testing.assert_array_equal(lindblad_rhs(rho, NO, [0, 0, 0]), np.zeros((8, 8)))


def test_rhs_dissipative_excited_state():
    # (g/2)(2|0><0| - 2|1><1|) by hand
    np.testing.assert_allclose(lindblad_rhs(ONE, DI, [0.7]), 0.7 * np.diag([1, -1]), atol=1e-15)


def test_rhs_dephasing_plus_state():
    out = lindblad_rhs(PLUS, DE, [0.8])
    np.testing.assert_allclose(out, [[0, -0.2], [-0.2, 0]], atol=1e-15)
    assert out[0, 1] == pytest.approx(-(0.8 / 2) * PLUS[0, 1])


def test_rhs_noisy_ground_state():
    np.testing.assert_allclose(lindblad_rhs(np.diag([1, 0]), NO, [1.0]), np.diag([-1, 1]), atol=1e-15)


@pytest.mark.parametrize("kind", KINDS)
def test_rhs_hermitian_traceless(rng, kind):
    for _ in range(100):
        rho = random_density(rng, 3)
        out = lindblad_rhs(rho, kind, rng.uniform(0, 2, size=3))
        assert np.max(np.abs(out - out.conj().T)) <= 1e-12
        assert abs(np.trace(out)) <= 1e-12


def test_rhs_rejects_negative_rate():
    with pytest.raises(ValueError, match="nonnegative"):
        lindblad_rhs(ONE, DI, [-0.1])
    with pytest.raises(ValueError, match="rates"):
        lindblad_rhs(ONE, DI, [0.1, 0.1])


@pytest.mark.parametrize("kind", KINDS)
def test_kraus_completeness(kind):
    for t in np.linspace(0, 10, 20):
        ks = kraus_single(kind, t)
        total = sum(k.conj().T @ k for k in ks)
        assert np.max(np.abs(total - I2)) <= 1e-12


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 2.5, 7.0])
def test_kraus_matches_liouvillian_exponential(rng, kind, t):
    prop = scipy.linalg.expm(t * liouvillian(kind))
    for _ in range(5):
        rho = random_density(rng, 1)
        exact = (prop @ rho.reshape(-1, order="F")).reshape(2, 2, order="F")
        got = sum(k @ rho @ k.conj().T for k in kraus_single(kind, t))
        np.testing.assert_allclose(got, exact, atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_kraus_identity_at_zero(rng, kind):
    rho = random_density(rng, 1)
    np.testing.assert_allclose(sum(k @ rho @ k.conj().T for k in kraus_single(kind, 0.0)), rho, atol=1e-15)


def test_dissipative_fixed_point(rng):
    rho = evolve_kraus(random_density(rng, 1), DI, 2, 60.0)
    np.testing.assert_allclose(rho, np.diag([1, 0]), atol=1e-12)


@pytest.mark.parametrize("case", [1, 2])
def test_noisy_fixed_point(rng, case):
    for _ in range(10):
        rho = evolve_kraus(random_density(rng, 1), NO, case, 20.0)
        assert np.max(np.abs(rho - I2 / 2)) <= 1e-8


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("case", [1, 2, 3])
def test_semigroup(rng, kind, case):
    rho = random_density(rng, 3)
    two_step = evolve_kraus(evolve_kraus(rho, kind, case, 0.4), kind, case, 0.9)
    np.testing.assert_allclose(two_step, evolve_kraus(rho, kind, case, 1.3), atol=1e-12)


@pytest.mark.parametrize("case", [1, 2, 3])
def test_dephasing_keeps_populations(rng, case):
    rho = random_density(rng, 3)
    out = evolve_kraus(rho, DE, case, 3.0)
    assert np.max(np.abs(np.diag(out) - np.diag(rho))) <= 1e-12


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("case", [1, 2, 3])
def test_kraus_output_is_state(rng, kind, case):
    for t in (0.1, 1.0, 5.0):
        assert is_density_matrix(evolve_kraus(random_density(rng, 3), kind, case, t))


def test_dephasing_bob_scales_bell_coherence():
    t = 1.7
    out = evolve_kraus(bell_phi_plus(), DE, 2, t)
    assert out[0, 3] == pytest.approx(0.5 * math.exp(-t / 2), abs=1e-15)
    np.testing.assert_allclose(np.diag(out).real, [0.5, 0, 0, 0.5], atol=1e-15)


def test_zero_time_is_identity(rng):
    rho = random_density(rng, 3)
    for kind in KINDS:
        np.testing.assert_allclose(evolve_kraus(rho, kind, 1, 0.0), rho, atol=1e-15)
        np.testing.assert_array_equal(evolve_ode(rho, kind, 1, 0.0), rho)


def test_ode_two_level_decay():
    out = evolve_ode(ONE, DI, 2, 1.0)
    np.testing.assert_allclose(out, np.diag([1 - math.exp(-1), math.exp(-1)]), atol=1e-8)


def test_ode_noisy_closed_form():
    # population gap relaxes at rate 2, coherence at rate 1
    rho0 = bloch_pure_state(BlochAngles(0.8, 0.3))
    t = 1.2
    out = evolve_ode(rho0, NO, 1, t)
    assert out[1, 1].real - 0.5 == pytest.approx((rho0[1, 1].real - 0.5) * math.exp(-2 * t), abs=1e-10)
    assert abs(out[0, 1] - rho0[0, 1] * math.exp(-t)) <= 1e-10


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("case", [1, 2, 3])
def test_ode_matches_kraus(kind, case):
    rho = tensor(bloch_pure_state(BlochAngles(1.0, 2.0)), bell_phi_plus())
    ode = evolve_ode(rho, kind, case, 0.5, step=1e-3)
    assert trace_distance(ode, evolve_kraus(rho, kind, case, 0.5)) <= 1e-8


def test_ode_is_hermitian_exactly(rng):
    out = evolve_ode(random_density(rng, 3), NO, 3, 0.05)
    np.testing.assert_array_equal(out, out.conj().T)


def test_ode_rejects_bad_step():
    with pytest.raises(ValueError, match="step"):
        evolve_ode(ONE, DI, 2, 1.0, step=0.0)
    with pytest.raises(ValueError, match="nonnegative"):
        evolve_ode(ONE, DI, 2, -1.0)


def test_ode_steps_hits_end():
    assert ode_steps(1.0, 1e-3) == 1000
    assert ode_steps(0.25, 1e-3) == 250
    assert ode_steps(0.0, 1e-3) == 0
    assert ode_steps(0.0015, 1e-3) == 2
