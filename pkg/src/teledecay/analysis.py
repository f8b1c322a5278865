"""Critical times, curve crossings and sudden-death times by bisection."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

from teledecay import metrics
from teledecay.channels import EnvironmentKind, check_case
from teledecay.teleport import CLASSICAL_BOUND, QuadratureSpec, TeleportSpec, average_fidelity

DEFAULT_BRACKET = (0.0, 50.0)
XTOL = 1e-12
MAX_ITER = 200
# g(end) above -GUARD counts as "never crossed" (the true excess can be far
# below double resolution of 2/3, e.g. e^{-100}/3)
GUARD = 1e-9

_E = EnvironmentKind
LN_1P_SQRT2 = math.log(1 + math.sqrt(2))

# (kind, case) pairs whose closed-form F_av stays above 2/3 for all time
NEVER_BELOW_CLASSICAL = frozenset(
    [(_E.DISSIPATIVE, 1), (_E.DEPHASING, 1), (_E.DEPHASING, 2), (_E.DEPHASING, 3)]
)

CRITICAL_TIME_SURDS = {
    (_E.DISSIPATIVE, 2): 2 * LN_1P_SQRT2,
    (_E.DISSIPATIVE, 3): LN_1P_SQRT2,
    (_E.NOISY, 1): LN_1P_SQRT2 / 2,
    (_E.NOISY, 2): LN_1P_SQRT2,
    (_E.NOISY, 3): LN_1P_SQRT2 / 2,
}


class Source(enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric"

    @classmethod
    def parse(cls, text: "str | Source") -> "Source":
        if isinstance(text, cls):
            return text
        return cls(str(text).strip().lower())


@dataclass(frozen=True)
class RootResult:
    gamma_t: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


@dataclass(frozen=True)
class NoFiniteRoot:
    """No crossing in the bracket; ``g_end`` is the function value at its right end."""

    g_end: float
    bracket: tuple[float, float]
    reason: str = ""


def classical_fidelity_bound() -> float:
    return CLASSICAL_BOUND


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = XTOL,
    max_iter: int = MAX_ITER,
) -> RootResult:
    """Bisection root of ``f`` on ``[lo, hi]``.

    Raises:
        ValueError: if ``f(lo)`` and ``f(hi)`` do not have strictly opposite signs.
    """
    flo, fhi = f(lo), f(hi)
    if not flo * fhi < 0:
        raise ValueError(
            f"no sign change on [{lo}, {hi}]: f(lo) = {flo:.6g}, f(hi) = {fhi:.6g}"
        )
    it = 0
    while hi - lo > xtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = f(mid)
        it += 1
        if fmid == 0.0:
            lo = hi = mid
            flo = fhi = 0.0
            break
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    root, res = (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)
    return RootResult(root, res, it, (lo, hi))


def _excess(kind, case, source, quad):
    if source is Source.ANALYTIC:
        return lambda t: metrics.analytic_favg_excess(kind, case, t)
    return lambda t: average_fidelity(TeleportSpec(kind, case, t), quad) - CLASSICAL_BOUND


def find_critical_time(
    kind: EnvironmentKind,
    case: int,
    source: "Source | str" = Source.ANALYTIC,
    quad: QuadratureSpec = QuadratureSpec(),
    bracket: tuple[float, float] = DEFAULT_BRACKET,
) -> RootResult | NoFiniteRoot:
    """Time at which the average fidelity falls to 2/3, or :class:`NoFiniteRoot`.

    ``source`` picks the closed form or the Kraus pipeline with quadrature.
    A finding that contradicts the known closed-form behaviour raises
    ``RuntimeError`` rather than being reported.
    """
    kind, case, source = EnvironmentKind.parse(kind), check_case(case), Source.parse(source)
    g = _excess(kind, case, source, quad)
    lo, hi = bracket
    g_end = g(hi)
    crosses = g_end < -GUARD
    expected = (kind, case) not in NEVER_BELOW_CLASSICAL
    if crosses != expected:
        raise RuntimeError(
            f"{kind.code}/{case}: g({hi}) = {g_end:.3e} contradicts the closed-form "
            f"expectation ({'finite' if expected else 'no'} crossing)"
        )
    if not crosses:
        return NoFiniteRoot(g_end, (lo, hi), "average fidelity stays above 2/3")
    return bisect(g, lo, hi)


_QUANTITIES = {
    "favg": metrics.analytic_favg,
    "concurrence": metrics.analytic_concurrence,
    "purity": metrics.analytic_purity,
}


@dataclass(frozen=True)
class Curve:
    """A named curve of ``gamma_t`` such as ``favg:di:1`` or ``purity:no:2:numeric``."""

    quantity: str
    kind: EnvironmentKind
    case: int
    source: Source = Source.ANALYTIC
    quad: QuadratureSpec = field(default_factory=QuadratureSpec, compare=False)

    def __post_init__(self):
        if self.quantity not in _QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}; expected one of {sorted(_QUANTITIES)}")
        object.__setattr__(self, "kind", EnvironmentKind.parse(self.kind))
        object.__setattr__(self, "case", check_case(self.case))
        object.__setattr__(self, "source", Source.parse(self.source))

    @classmethod
    def parse(cls, text: str) -> "Curve":
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"curve {text!r} is not quantity:kind:case[:source]")
        return cls(parts[0], parts[1], int(parts[2]), *parts[3:])

    def __call__(self, gamma_t: float) -> float:
        if self.source is Source.ANALYTIC:
            return _QUANTITIES[self.quantity](self.kind, self.case, gamma_t)
        if self.quantity == "favg":
            return average_fidelity(TeleportSpec(self.kind, self.case, gamma_t), self.quad)
        rho = metrics.channel_state(self.kind, self.case, gamma_t)
        if self.quantity == "purity":
            return metrics.purity(rho)
        return metrics.concurrence(rho)

    def __str__(self):
        return f"{self.quantity}:{self.kind.code}:{self.case}:{self.source.value}"


def find_crossing(curve_a: Curve | str, curve_b: Curve | str, bracket: tuple[float, float]) -> RootResult:
    """Where ``curve_a - curve_b`` changes sign inside ``bracket``.

    Raises:
        ValueError: if there is no sign change (identical curves included).
    """
    a = curve_a if isinstance(curve_a, Curve) else Curve.parse(curve_a)
    b = curve_b if isinstance(curve_b, Curve) else Curve.parse(curve_b)
    try:
        return bisect(lambda t: a(t) - b(t), *bracket)
    except ValueError as exc:
        raise ValueError(f"{a} and {b} do not cross in {bracket}: {exc}") from None


def find_esd_time(
    kind: EnvironmentKind, case: int, bracket: tuple[float, float] = DEFAULT_BRACKET
) -> RootResult | NoFiniteRoot:
    """First time the closed-form concurrence hits zero.

    The root is found on the smooth expression inside ``max(., 0)``; the
    clipped curve is flat at zero and would stall bisection.
    """
    kind, case = EnvironmentKind.parse(kind), check_case(case)
    lo, hi = bracket
    if kind is not _E.NOISY:
        return NoFiniteRoot(
            metrics.analytic_concurrence(kind, case, hi), (lo, hi), "concurrence decays exponentially"
        )
    return bisect(lambda t: metrics.noisy_concurrence_inner(case, t), lo, hi)


def fidelity_crossing_surd() -> float:
    m = 64 + 6 * math.sqrt(114)
    return 2 * math.log(6 / (m ** (1 / 3) - 2 * m ** (-1 / 3) - 2))


def purity_crossing_surd() -> float:
    n = 8 + 6 * math.sqrt(78)
    return math.log(6 / (n ** (1 / 3) - 14 * n ** (-1 / 3) + 2))


def threshold_concurrence_surd() -> float:
    return math.sqrt(math.sqrt(2) - 1) + math.sqrt(2) / 2 - 1


@dataclass(frozen=True)
class ConstantCheck:
    name: str
    target: float
    surd: float
    bisection: float
    target_tol: float
    cross_tol: float = 1e-10

    @property
    def target_error(self) -> float:
        return abs(self.surd - self.target)

    @property
    def cross_error(self) -> float:
        return abs(self.surd - self.bisection)

    @property
    def passed(self) -> bool:
        return self.target_error <= self.target_tol and self.cross_error <= self.cross_tol


def verify_reference_constants() -> list[ConstantCheck]:
    """Recompute each reference constant from its surd and by bisection."""
    checks = []
    rounded = {LN_1P_SQRT2 * 2: 1.76275, LN_1P_SQRT2: 0.88137, LN_1P_SQRT2 / 2: 0.44069}
    for (kind, case), surd in CRITICAL_TIME_SURDS.items():
        root = find_critical_time(kind, case, Source.ANALYTIC)
        checks.append(
            ConstantCheck(f"critical_time_{kind.code}{case}", rounded[surd], surd, root.gamma_t, 1e-5)
        )
    fid = find_crossing(Curve("favg", _E.DISSIPATIVE, 1), Curve("favg", _E.DISSIPATIVE, 2), (1.0, 2.0))
    checks.append(ConstantCheck("crossing_fidelity_di", 1.6391, fidelity_crossing_surd(), fid.gamma_t, 1e-3))
    pur = find_crossing(Curve("purity", _E.DISSIPATIVE, 1), Curve("purity", _E.DISSIPATIVE, 2), (0.5, 1.5))
    checks.append(ConstantCheck("crossing_purity_di", 0.9248, purity_crossing_surd(), pur.gamma_t, 1e-3))
    t_c = find_critical_time(_E.NOISY, 3, Source.ANALYTIC).gamma_t
    checks.append(
        ConstantCheck(
            "threshold_concurrence_no3",
            0.3507,
            threshold_concurrence_surd(),
            metrics.analytic_concurrence(_E.NOISY, 3, t_c),
            1e-4,
        )
    )
    return checks
