"""Grid sweeps over (kind, case, gamma_t) and their CSV/JSON serialization."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from teledecay import metrics
from teledecay.channels import CASES, DEFAULT_ODE_STEP, EnvironmentKind, check_case
from teledecay.teleport import Method, QuadratureSpec, TeleportSpec, average_fidelity


class ConfigError(ValueError):
    """Invalid sweep configuration; ``field`` names the offending setting."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class SweepRecord:
    kind: str
    case: int
    gamma_t: float
    favg_numeric: float
    favg_analytic: float
    concurrence_numeric: float
    concurrence_analytic: float
    purity_numeric: float
    purity_analytic: float
    abs_err_favg: float


CSV_HEADER = ",".join(f.name for f in fields(SweepRecord))


@dataclass
class SweepConfig:
    kinds: list[EnvironmentKind] = field(default_factory=lambda: list(EnvironmentKind))
    cases: list[int] = field(default_factory=lambda: list(CASES))
    t_start: float = 0.0
    t_end: float = 3.0
    t_step: float = 0.05
    method: Method = Method.KRAUS
    ode_step: float = DEFAULT_ODE_STEP
    n_theta: int = 8
    n_phi: int = 16
    out: str | None = None
    format: str = "csv"
    workers: int = 1

    def validate(self) -> "SweepConfig":
        try:
            self.kinds = [EnvironmentKind.parse(k) for k in self.kinds]
        except ValueError as exc:
            raise ConfigError("kinds", str(exc)) from None
        try:
            self.cases = [check_case(c) for c in self.cases]
        except ValueError as exc:
            raise ConfigError("cases", str(exc)) from None
        try:
            self.method = Method.parse(self.method)
        except ValueError as exc:
            raise ConfigError("method", str(exc)) from None
        if not self.kinds:
            raise ConfigError("kinds", "at least one environment kind is required")
        if not self.cases:
            raise ConfigError("cases", "at least one case is required")
        for name in ("t_start", "t_end", "t_step", "ode_step"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(name, f"must be finite, got {getattr(self, name)!r}")
        if self.t_start < 0:
            raise ConfigError("t_start", f"must be >= 0, got {self.t_start}")
        if not self.t_start < self.t_end:
            raise ConfigError("t_end", f"must exceed t_start ({self.t_start}), got {self.t_end}")
        if not self.t_step > 0:
            raise ConfigError("t_step", f"must be positive, got {self.t_step}")
        if not self.ode_step > 0:
            raise ConfigError("ode_step", f"must be positive, got {self.ode_step}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format", f"must be csv or json, got {self.format!r}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")
        try:
            QuadratureSpec(self.n_theta, self.n_phi)
        except ValueError as exc:
            name = "n_theta" if "n_theta" in str(exc) else "n_phi"
            raise ConfigError(name, str(exc)) from None
        return self

    @property
    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(self.n_theta, self.n_phi)

    def times(self) -> list[float]:
        n = math.floor((self.t_end - self.t_start) / self.t_step + 1e-9)
        return [round(self.t_start + i * self.t_step, 12) for i in range(n + 1)]

    def grid(self) -> list[tuple[EnvironmentKind, int, float]]:
        kinds = sorted(set(self.kinds), key=list(EnvironmentKind).index)
        return [(k, c, t) for k in kinds for c in sorted(set(self.cases)) for t in self.times()]


def parse_kinds(text: str) -> list[EnvironmentKind]:
    if text.strip().lower() == "all":
        return list(EnvironmentKind)
    try:
        return [EnvironmentKind.parse(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError("kinds", str(exc)) from None


def parse_cases(text: str) -> list[int]:
    if text.strip().lower() == "all":
        return list(CASES)
    try:
        return [check_case(int(p)) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError("cases", str(exc)) from None


_CONVERTERS = {
    "kinds": parse_kinds,
    "cases": parse_cases,
    "t_start": float,
    "t_end": float,
    "t_step": float,
    "method": Method.parse,
    "ode_step": float,
    "n_theta": int,
    "n_phi": int,
    "out": str,
    "format": lambda s: s.strip().lower(),
    "workers": int,
}


def apply_settings(config: SweepConfig, settings: dict[str, str]) -> SweepConfig:
    """Overwrite fields of ``config`` from string-valued ``settings``."""
    for raw_key, value in settings.items():
        key = raw_key.strip().replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(raw_key, "unknown setting")
        try:
            setattr(config, key, _CONVERTERS[key](str(value).strip()))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
    return config


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    settings = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}", f"expected key = value, got {line!r}")
        key, value = line.split("=", 1)
        settings[key.strip()] = value.strip()
    return settings


def compute_record(kind: EnvironmentKind, case: int, gamma_t: float, config: SweepConfig) -> SweepRecord:
    spec = TeleportSpec(kind, case, gamma_t, config.method, config.ode_step)
    favg = average_fidelity(spec, config.quad)
    favg_exact = metrics.analytic_favg(kind, case, gamma_t)
    rho = metrics.channel_state(kind, case, gamma_t, config.method, config.ode_step)
    return SweepRecord(
        kind=kind.code,
        case=case,
        gamma_t=gamma_t,
        favg_numeric=favg,
        favg_analytic=favg_exact,
        concurrence_numeric=metrics.concurrence(rho),
        concurrence_analytic=metrics.analytic_concurrence(kind, case, gamma_t),
        purity_numeric=metrics.purity(rho),
        purity_analytic=metrics.analytic_purity(kind, case, gamma_t),
        abs_err_favg=abs(favg - favg_exact),
    )


def _record_task(args):
    return compute_record(*args)


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Records in (kind, case, gamma_t) order regardless of worker count."""
    config.validate()
    tasks = [(k, c, t, config) for k, c, t in config.grid()]
    if config.workers == 1 or len(tasks) < 2:
        return [_record_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        # map() yields in submission order
        return list(pool.map(_record_task, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(x, ".17g")


def _cell(value) -> str:
    return fmt(value) if isinstance(value, float) else str(value)


def render_csv(records: list[SweepRecord]) -> str:
    lines = [CSV_HEADER]
    lines += [",".join(_cell(v) for v in asdict(r).values()) for r in records]
    return "\n".join(lines) + "\n"


def _json_value(value) -> str:
    if isinstance(value, float):
        return fmt(value)
    return json.dumps(value)


def render_json(records: list[SweepRecord]) -> str:
    """JSON array of record objects with 17-digit numbers."""
    if not records:
        return "[]\n"
    rows = []
    for r in records:
        items = ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in asdict(r).items())
        rows.append("  {" + items + "}")
    return "[\n" + ",\n".join(rows) + "\n]\n"


def render(records: list[SweepRecord], fmt_name: str) -> str:
    return render_json(records) if fmt_name == "json" else render_csv(records)


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
