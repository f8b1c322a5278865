import csv
import io
import json
import math
import subprocess
import sys

import pytest

from teledecay import cli
from teledecay.sweep import CSV_HEADER, ConfigError, SweepConfig, apply_settings, fmt, read_config_file, render_csv, run_sweep

FIELDS = CSV_HEADER.split(",")


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_csv_header_order():
    assert FIELDS == [
        "kind",
        "case",
        "gamma_t",
        "favg_numeric",
        "favg_analytic",
        "concurrence_numeric",
        "concurrence_analytic",
        "purity_numeric",
        "purity_analytic",
        "abs_err_favg",
    ]


def test_sweep_single_row(capsys):
    code, out, _ = run(["sweep", "--kinds", "di", "--cases", "1", "--t-start", "0", "--t-end", "0.5", "--t-step", "0.5"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["kind"] == "di" and row["case"] == "1" and float(row["gamma_t"]) == 0.0
    assert float(row["favg_numeric"]) == pytest.approx(1.0, abs=1e-12)
    last = lines[2].split(",")
    assert float(last[FIELDS.index("concurrence_analytic")]) == math.exp(-1)


def test_seventeen_digits():
    assert fmt(2 / 3) == "0.66666666666666663"
    assert float(fmt(math.exp(-1))) == math.exp(-1)


def test_sweep_grid_and_order():
    cfg = SweepConfig(cases=[3, 1], t_start=0.0, t_end=0.2, t_step=0.1)
    assert cfg.times() == [0.0, 0.1, 0.2]
    keys = [(r.kind, r.case) for r in run_sweep(cfg)]
    assert keys[:3] == [("di", 1)] * 3
    assert [k for i, k in enumerate(keys) if i % 3 == 0] == [("di", 1), ("di", 3), ("no", 1), ("no", 3), ("de", 1), ("de", 3)]


def test_sweep_errors_small():
    for r in run_sweep(SweepConfig(t_start=0, t_end=3, t_step=0.5)):
        assert r.abs_err_favg <= 1e-10
        assert abs(r.concurrence_numeric - r.concurrence_analytic) <= 1e-10
        assert abs(r.purity_numeric - r.purity_analytic) <= 1e-10


def test_sweep_ode_method(capsys):
    code, out, _ = run(["sweep", "--kinds", "no", "--cases", "2", "--t-start", "0.5", "--t-end", "1", "--t-step", "0.5", "--ode", "--ode-step", "1e-3"], capsys)
    assert code == 0
    for row in csv.DictReader(io.StringIO(out)):
        assert float(row["abs_err_favg"]) <= 1e-10


def test_sweep_json(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, _, _ = run(["sweep", "--kinds", "de", "--cases", "2,3", "--t-end", "0.2", "--t-step", "0.1", "--format", "json", "--out", str(path)], capsys)
    assert code == 0
    data = json.loads(path.read_text())
    assert len(data) == 6
    assert list(data[0]) == FIELDS
    assert data[0]["kind"] == "de" and isinstance(data[0]["case"], int)
    assert data[-1]["favg_analytic"] == 2 / 3 + math.exp(-0.2) / 3


def test_determinism_across_workers(tmp_path, capsys):
    outputs = []
    for workers in ("1", "4", "1"):
        path = tmp_path / f"w{workers}_{len(outputs)}.csv"
        assert run(["sweep", "--t-end", "0.6", "--t-step", "0.2", "--workers", workers, "--out", str(path)], capsys)[0] == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    assert b"\r" not in outputs[0]


def test_fig2(tmp_path, capsys):
    code, out, _ = run(["fig2", "--out", str(tmp_path)], capsys)
    assert code == 0
    for name, kind in (("fig2a", "di"), ("fig2b", "no"), ("fig2c", "de")):
        rows = list(csv.DictReader((tmp_path / f"{name}.csv").open()))
        assert len(rows) == 3 * 61
        assert {r["kind"] for r in rows} == {kind}
    rows = list(csv.DictReader((tmp_path / "fig2a.csv").open()))
    last = [r for r in rows if r["case"] == "1"][-1]
    assert float(last["gamma_t"]) == 3.0
    assert float(last["favg_numeric"]) == pytest.approx(2 / 3 + math.exp(-6) / 3, abs=1e-12)


def test_fig2_missing_directory(tmp_path, capsys):
    code, _, err = run(["fig2", "--out", str(tmp_path / "nope")], capsys)
    assert code == 2 and "does not exist" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# demo\nkinds = no\ncases = 2\nt-end = 1.0\nt_step = 0.5  # coarse\nformat = json\n")
    assert read_config_file(conf)["t_step"] == "0.5"
    code, out, _ = run(["sweep", "--config", str(conf), "--format", "csv", "--t-end", "0.5"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["kind"], r["case"], float(r["gamma_t"])) for r in rows] == [("no", "2", 0.0), ("no", "2", 0.5)]


@pytest.mark.parametrize(
    "flags,field",
    [
        (["--t-end", "-1"], "t_end"),
        (["--t-step", "0"], "t_step"),
        (["--t-start", "abc"], "t_start"),
        (["--kinds", "xx"], "kinds"),
        (["--cases", "1,5"], "cases"),
        (["--n-theta", "2"], "n_theta"),
        (["--n-phi", "4"], "n_phi"),
        (["--workers", "0"], "workers"),
        (["--ode-step=-1e-3"], "ode_step"),
    ],
)
def test_invalid_field_exit_1(flags, field, capsys):
    code, _, err = run(["sweep", *flags], capsys)
    assert code == 1
    assert field in err


def test_bad_config_file(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = blue\n")
    code, _, err = run(["sweep", "--config", str(conf)], capsys)
    assert code == 1 and "colour" in err
    code, _, err = run(["sweep", "--config", str(tmp_path / "missing.conf")], capsys)
    assert code == 1 and "config" in err


def test_apply_settings_unknown_key():
    with pytest.raises(ConfigError) as exc:
        apply_settings(SweepConfig(), {"t_sart": "1"})
    assert exc.value.field == "t_sart"


def test_usage_error_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--method", "euler"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 1


def test_unwritable_output_exit_2(tmp_path, capsys):
    code, _, err = run(["sweep", "--t-end", "0.1", "--t-step", "0.1", "--out", str(tmp_path / "no" / "dir" / "x.csv")], capsys)
    assert code == 2 and err


def test_critical_times(tmp_path, capsys):
    path = tmp_path / "ct.json"
    code, out, _ = run(["critical-times", "--out", str(path)], capsys)
    assert code == 0
    assert "NoFiniteRoot" in out
    rows = {(r["kind"], r["case"]): r for r in json.loads(path.read_text())}
    assert len(rows) == 9
    ln = math.log(1 + math.sqrt(2))
    assert rows[("di", 2)]["critical_analytic"] == pytest.approx(2 * ln, abs=1e-10)
    assert rows[("di", 2)]["critical_numeric"] == pytest.approx(2 * ln, abs=1e-8)
    assert rows[("de", 3)]["critical_numeric"] is None
    assert rows[("no", 3)]["esd"] == pytest.approx(ln, abs=1e-10)
    assert rows[("no", 3)]["critical_analytic"] == pytest.approx(ln / 2, abs=1e-10)


def test_critical_times_bad_quadrature(capsys):
    assert run(["critical-times", "--n-theta", "2"], capsys)[0] == 1


def test_verify_exit_0(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out, _ = run(["verify", "--out", str(path)], capsys)
    assert code == 0
    assert "FAIL" not in out
    report = json.loads(path.read_text())
    assert report["passed"] is True
    names = {c["name"]: c for c in report["checks"]}
    assert names["crossing_fidelity_di"]["target"] == 1.6391
    assert names["threshold_concurrence_no3"]["target"] == 0.3507


def test_verify_failure_exit_3(monkeypatch, capsys):
    from teledecay import verify

    monkeypatch.setattr(verify, "ALL_CHECKS", (lambda: verify.CheckResult("forced", False, 1.0, 0.0),))
    code, out, _ = run(["verify"], capsys)
    assert code == 3 and "FAIL forced" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "teledecay", "sweep", "--kinds", "di", "--cases", "2", "--t-end", "0.1", "--t-step", "0.1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == CSV_HEADER


def test_render_roundtrip():
    records = run_sweep(SweepConfig(kinds=["di"], cases=[2], t_end=0.3, t_step=0.1))
    rows = list(csv.DictReader(io.StringIO(render_csv(records))))
    for rec, row in zip(records, rows):
        assert float(row["favg_numeric"]) == rec.favg_numeric
        assert float(row["purity_numeric"]) == rec.purity_numeric
