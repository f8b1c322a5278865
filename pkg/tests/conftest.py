import importlib

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


def _backends():
    out = [pytest.param("python", id="python")]
    try:
        importlib.import_module("teledecay._ckernels")
    except ImportError:
        out.append(pytest.param("cython", id="cython", marks=pytest.mark.skip("extension not built")))
    else:
        out.append(pytest.param("cython", id="cython"))
    return out


@pytest.fixture(params=_backends())
def backend(request):
    name = {"python": "teledecay._pykernels", "cython": "teledecay._ckernels"}[request.param]
    return importlib.import_module(name)


@pytest.fixture
def rng():
    return np.random.default_rng(20100101)


def random_density(rng, n_qubits, rank=None):
    d = 1 << n_qubits
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
