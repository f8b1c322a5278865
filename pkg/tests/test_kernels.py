import os
import subprocess
import sys

import numpy as np
import pytest

from teledecay import _pykernels
from teledecay.qops import SIGMA_MINUS, SIGMA_PLUS, embed_gate

from conftest import random_density


def _jumps(n):
    ops = [embed_gate(op, [q], n) for q in range(1, n + 1) for op in (SIGMA_MINUS, SIGMA_PLUS)]
    return np.array(ops)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rhs_matches_reference(backend, rng, n):
    rho = random_density(rng, n)
    jumps = _jumps(n)
    rates = rng.uniform(0, 2, size=len(jumps))
    rates[0] = 0.0
    expected = sum(
        g * (2 * L @ rho @ L.conj().T - L.conj().T @ L @ rho - rho @ L.conj().T @ L) / 2
        for g, L in zip(rates, jumps)
    )
    np.testing.assert_allclose(backend.lindblad_rhs(rho, jumps, rates), expected, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rhs_dense_jumps(backend, rng, n):
    # arbitrary non-Hermitian operators with no zero entries
    d = 1 << n
    rho = random_density(rng, n)
    jumps = rng.normal(size=(3, d, d)) + 1j * rng.normal(size=(3, d, d))
    rates = np.array([0.3, 1.1, 0.0])
    expected = sum(
        g * (2 * L @ rho @ L.conj().T - L.conj().T @ L @ rho - rho @ L.conj().T @ L) / 2
        for g, L in zip(rates, jumps)
    )
    np.testing.assert_allclose(backend.lindblad_rhs(rho, jumps, rates), expected, atol=1e-12)
    out = backend.rk4_lindblad(rho, jumps, rates, 0.05, 50)
    np.testing.assert_allclose(out, _pykernels.rk4_lindblad(rho, jumps, rates, 0.05, 50), atol=1e-12)


def test_rk4_backends_agree(backend, rng):
    rho = random_density(rng, 3)
    jumps = _jumps(3)
    rates = rng.uniform(0, 1, size=len(jumps))
    ref = _pykernels.rk4_lindblad(rho, jumps, rates, 0.7, 350)
    out = backend.rk4_lindblad(rho, jumps, rates, 0.7, 350)
    np.testing.assert_allclose(out, ref, atol=1e-13)
    np.testing.assert_array_equal(out, out.conj().T)


def test_rk4_zero_steps_is_copy(backend, rng):
    rho = random_density(rng, 2)
    out = backend.rk4_lindblad(rho, _jumps(2), np.ones(4), 1.0, 0)
    np.testing.assert_array_equal(out, rho)
    assert out is not rho


def test_rk4_does_not_mutate_input(backend, rng):
    rho = random_density(rng, 2)
    before = rho.copy()
    backend.rk4_lindblad(rho, _jumps(2), np.ones(4), 0.5, 10)
    np.testing.assert_array_equal(rho, before)


@pytest.mark.parametrize("n,qubit", [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)])
def test_local_kraus_matches_embedded_sum(backend, rng, n, qubit):
    rho = random_density(rng, n)
    kraus = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    expected = np.zeros_like(rho)
    for k in kraus:
        full = embed_gate(k, [qubit + 1], n)
        expected += full @ rho @ full.conj().T
    np.testing.assert_allclose(backend.apply_local_kraus(rho, kraus, qubit, n), expected, atol=1e-13)


def test_pure_python_switch():
    env = dict(os.environ, TELEDECAY_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import teledecay.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
