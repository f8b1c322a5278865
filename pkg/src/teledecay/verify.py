"""Self-checks run by ``teledecay verify``: numeric pipeline vs closed forms."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from teledecay import analysis, channels, metrics, sweep
from teledecay.channels import CASES, EnvironmentKind
from teledecay.qops import BlochAngles, bell_phi_plus, bloch_pure_state, tensor, trace_distance
from teledecay.teleport import (
    TeleportSpec,
    average_fidelity,
    average_fidelity_six_state,
    fidelity,
    measure_and_correct_output,
    teleport_output,
)

GRID = [i / 10 for i in range(31)]
CONFIGS = list(itertools.product(EnvironmentKind, CASES))


@dataclass
class CheckResult:
    name: str
    passed: bool
    observed: float
    tolerance: float
    target: float | None = None
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        target = "" if self.target is None else f" target={self.target:.6g}"
        return f"{tag} {self.name}: observed={self.observed:.3e} tol={self.tolerance:.1e}{target} {self.detail}".rstrip()

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "observed": float(self.observed),
            "tolerance": float(self.tolerance),
            "target": self.target,
            "detail": self.detail,
        }


def _check(name, observed, tol, **kw):
    return CheckResult(name, bool(observed <= tol), float(observed), tol, **kw)


def check_favg_closed_forms():
    err = max(
        abs(average_fidelity(TeleportSpec(k, c, t)) - metrics.analytic_favg(k, c, t))
        for k, c in CONFIGS
        for t in GRID
    )
    return _check("favg_closed_forms", err, 1e-10)


def check_ode_kraus():
    start = tensor(bloch_pure_state(BlochAngles(1.0, 2.0)), bell_phi_plus())
    err = 0.0
    for (k, c), t in itertools.product(CONFIGS, (0.25, 0.5, 1.0, 2.0)):
        ode = channels.evolve_ode(start, k, c, t, 1e-3)
        err = max(err, trace_distance(ode, channels.evolve_kraus(start, k, c, t)))
    return _check("ode_kraus_equivalence", err, 1e-8)


def check_critical_times():
    err, bad = 0.0, []
    for k, c in CONFIGS:
        res = analysis.find_critical_time(k, c, analysis.Source.NUMERIC)
        surd = analysis.CRITICAL_TIME_SURDS.get((k, c))
        if surd is None:
            exact_excess = metrics.analytic_favg_excess(k, c, analysis.DEFAULT_BRACKET[1])
            if not isinstance(res, analysis.NoFiniteRoot) or not exact_excess > 0:
                bad.append(f"{k.code}{c}")
        elif isinstance(res, analysis.NoFiniteRoot):
            bad.append(f"{k.code}{c}")
        else:
            err = max(err, abs(res.gamma_t - surd))
    detail = f"unexpected: {','.join(bad)}" if bad else ""
    return CheckResult("critical_times_numeric", not bad and err <= 1e-8, err, 1e-8, detail=detail)


def check_constants():
    out = []
    for c in analysis.verify_reference_constants():
        out.append(
            CheckResult(
                c.name,
                c.passed,
                c.target_error,
                c.target_tol,
                target=c.target,
                detail=f"surd={c.surd:.12f} bisection={c.bisection:.12f} cross_err={c.cross_error:.1e}",
            )
        )
    return out


def check_esd():
    ok, detail = True, []
    for case in (1, 2):
        kink = analysis.find_esd_time(EnvironmentKind.NOISY, case).gamma_t
        ok &= metrics.concurrence(metrics.channel_state(EnvironmentKind.NOISY, case, kink)) <= 1e-10
        for t in (kink + 0.25, kink + 0.5):
            ok &= metrics.concurrence(metrics.channel_state(EnvironmentKind.NOISY, case, t)) == 0.0
        ok &= metrics.concurrence(metrics.channel_state(EnvironmentKind.NOISY, case, kink - 0.05)) > 0
        detail.append(f"no{case}@{kink:.6f}")
    floor = min(
        metrics.concurrence(metrics.channel_state(k, c, 20.0))
        for k in (EnvironmentKind.DISSIPATIVE, EnvironmentKind.DEPHASING)
        for c in CASES
    )
    ok &= floor > 0
    return CheckResult("esd_noisy", bool(ok), floor, 0.0, detail=" ".join(detail) + f" min_C(t=20)={floor:.3e}")


def check_channel_closed_forms():
    err = 0.0
    for (k, c), t in itertools.product(CONFIGS, GRID):
        rho = metrics.channel_state(k, c, t)
        err = max(
            err,
            abs(metrics.concurrence(rho) - metrics.analytic_concurrence(k, c, t)),
            abs(metrics.purity(rho) - metrics.analytic_purity(k, c, t)),
        )
    return _check("concurrence_purity_closed_forms", err, 1e-10)


def _angle_grid(n_theta=8, n_phi=8):
    return [
        BlochAngles(math.pi * i / (n_theta - 1), 2 * math.pi * j / n_phi)
        for i in range(n_theta)
        for j in range(n_phi)
    ]


def check_ideal():
    err = max(
        abs(1 - fidelity(a, teleport_output(a, TeleportSpec(k, c, 0.0))))
        for k, c in CONFIGS
        for a in _angle_grid()
    )
    return _check("ideal_protocol", err, 1e-12)


def check_six_state():
    err = max(
        abs(average_fidelity_six_state(s) - average_fidelity(s))
        for s in (TeleportSpec(k, c, t) for (k, c), t in itertools.product(CONFIGS, (0.5, 1.0, 2.0)))
    )
    return _check("six_state_identity", err, 1e-10)


def check_deferred(seed=7):
    rng = np.random.default_rng(seed)
    err = 0.0
    for (k, c), t in itertools.product(CONFIGS, (0.5, 1.0, 2.0)):
        spec = TeleportSpec(k, c, t)
        for _ in range(10):
            a = BlochAngles(float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(0, 2 * math.pi)))
            err = max(err, float(np.max(np.abs(teleport_output(a, spec) - measure_and_correct_output(a, spec)))))
    return _check("deferred_measurement", err, 1e-12)


def check_non_monotonicity():
    di = EnvironmentKind.DISSIPATIVE
    t = 2.0
    rho1, rho2 = metrics.channel_state(di, 1, t), metrics.channel_state(di, 2, t)
    c1, c2 = metrics.concurrence(rho1), metrics.concurrence(rho2)
    f1, f2 = average_fidelity(TeleportSpec(di, 1, t)), average_fidelity(TeleportSpec(di, 2, t))
    p1, p2 = metrics.purity(rho1), metrics.purity(rho2)
    ok = c1 < c2 and f1 > f2 and p1 > p2
    margin = min(c2 - c1, f1 - f2, p1 - p2)
    return CheckResult(
        "non_monotonicity_di",
        ok,
        margin,
        0.0,
        detail=f"C={c1:.4f}<{c2:.4f} F={f1:.4f}>{f2:.4f} P={p1:.4f}>{p2:.4f}",
    )


def check_determinism():
    cfg = sweep.SweepConfig(t_start=0.0, t_end=1.0, t_step=0.25)
    outputs = []
    for workers in (1, 4, 1):
        cfg.workers = workers
        outputs.append(sweep.render_csv(sweep.run_sweep(cfg)))
    ok = len(set(outputs)) == 1
    return CheckResult("sweep_determinism", ok, 0.0 if ok else 1.0, 0.0, detail="workers 1,4,1")


ALL_CHECKS = (
    check_favg_closed_forms,
    check_ode_kraus,
    check_critical_times,
    check_constants,
    check_esd,
    check_channel_closed_forms,
    check_ideal,
    check_six_state,
    check_deferred,
    check_non_monotonicity,
    check_determinism,
)


def run_checks() -> list[CheckResult]:
    results = []
    for check in ALL_CHECKS:
        out = check()
        results.extend(out if isinstance(out, list) else [out])
    return results
