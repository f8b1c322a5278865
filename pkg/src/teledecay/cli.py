"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 runtime failure (e.g. unwritable
output), 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from teledecay import analysis, kernels, verify
from teledecay.channels import CASES, EnvironmentKind
from teledecay.sweep import (
    ConfigError,
    SweepConfig,
    apply_settings,
    fmt,
    read_config_file,
    render,
    run_sweep,
    write_text,
)
from teledecay.teleport import QuadratureSpec

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("teledecay")

FIG2_PANELS = {"fig2a": EnvironmentKind.DISSIPATIVE, "fig2b": EnvironmentKind.NOISY, "fig2c": EnvironmentKind.DEPHASING}

_SWEEP_FLAGS = (
    "kinds",
    "cases",
    "t_start",
    "t_end",
    "t_step",
    "method",
    "ode_step",
    "n_theta",
    "n_phi",
    "out",
    "format",
    "workers",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_sweep_flags(p: argparse.ArgumentParser, out_help: str) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--kinds", help="comma list of di,no,de (or 'all')")
    p.add_argument("--cases", help="comma list of 1,2,3 (or 'all')")
    p.add_argument("--t-start", dest="t_start")
    p.add_argument("--t-end", dest="t_end")
    p.add_argument("--t-step", dest="t_step")
    p.add_argument("--method", choices=["kraus", "ode"])
    p.add_argument("--ode", dest="method", action="store_const", const="ode", help="same as --method ode")
    p.add_argument("--ode-step", dest="ode_step")
    p.add_argument("--n-theta", dest="n_theta")
    p.add_argument("--n-phi", dest="n_phi")
    p.add_argument("--out", help=out_help)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--workers")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="teledecay", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="average fidelity, concurrence and purity over a gamma_t grid")
    _add_sweep_flags(p, "output file (stdout if omitted)")

    p = sub.add_parser("fig2", help="write one sweep file per environment kind (fig2a/b/c) into a directory")
    _add_sweep_flags(p, "output directory (default: current directory)")

    p = sub.add_parser("critical-times", help="times where the average fidelity reaches 2/3")
    p.add_argument("--n-theta", dest="n_theta", type=int, default=8)
    p.add_argument("--n-phi", dest="n_phi", type=int, default=16)
    p.add_argument("--out", help="also write the table as JSON to this file")

    p = sub.add_parser("verify", help="run the numeric-vs-closed-form checks")
    p.add_argument("--out", help="also write the report as JSON to this file")
    return parser


def _sweep_config(args: argparse.Namespace, **defaults) -> SweepConfig:
    config = SweepConfig(**defaults)
    if args.config:
        try:
            settings = read_config_file(args.config)
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
        apply_settings(config, settings)
    flags = {k: getattr(args, k) for k in _SWEEP_FLAGS if getattr(args, k, None) is not None}
    apply_settings(config, flags)
    return config.validate()


def cmd_sweep(args) -> int:
    config = _sweep_config(args)
    text = render(run_sweep(config), config.format)
    if config.out:
        write_text(config.out, text)
        log.info("wrote %s", config.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fig2(args) -> int:
    out_dir = Path(args.out or ".")
    args.out = None
    base = _sweep_config(args, t_start=0.0, t_end=3.0, t_step=0.05)
    if not out_dir.is_dir():
        raise OSError(f"output directory {out_dir} does not exist")
    for name, kind in FIG2_PANELS.items():
        base.kinds, base.cases = [kind], list(CASES)
        path = out_dir / f"{name}.{base.format}"
        write_text(path, render(run_sweep(base), base.format))
        print(path)
    return EXIT_OK


def _root_value(res):
    return None if isinstance(res, analysis.NoFiniteRoot) else res.gamma_t


def critical_time_table(quad) -> list[dict]:
    rows = []
    for kind in EnvironmentKind:
        for case in CASES:
            rows.append(
                {
                    "kind": kind.code,
                    "case": case,
                    "critical_analytic": _root_value(analysis.find_critical_time(kind, case, "analytic")),
                    "critical_numeric": _root_value(analysis.find_critical_time(kind, case, "numeric", quad)),
                    "esd": _root_value(analysis.find_esd_time(kind, case)),
                }
            )
    return rows


def cmd_critical_times(args) -> int:
    try:
        quad = QuadratureSpec(args.n_theta, args.n_phi)
    except ValueError as exc:
        raise ConfigError("n_theta/n_phi", str(exc)) from None
    rows = critical_time_table(quad)

    def cell(v):
        return "NoFiniteRoot" if v is None else fmt(v)

    print(f"{'kind':<5}{'case':<6}{'critical_analytic':<22}{'critical_numeric':<22}esd")
    for r in rows:
        print(
            f"{r['kind']:<5}{r['case']:<6}{cell(r['critical_analytic']):<22}"
            f"{cell(r['critical_numeric']):<22}{cell(r['esd'])}"
        )
    if args.out:
        write_text(args.out, json.dumps(rows, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_checks()
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed (kernels: {kernels.BACKEND})")
    if args.out:
        report = {"passed": not failed, "backend": kernels.BACKEND, "checks": [r.as_dict() for r in results]}
        write_text(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "fig2": cmd_fig2,
    "critical-times": cmd_critical_times,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"teledecay: invalid {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, RuntimeError) as exc:
        print(f"teledecay: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
