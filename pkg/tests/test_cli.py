import csv
import dataclasses
import io
import subprocess
import sys

import pytest

from rsma_sop import presets, sweep
from rsma_sop.cli import main


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_analytic_point(capsys):
    assert main(["analytic", "--config", "fig2b", "--set", "tx_power_dbm=20"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 1
    assert set(rows[0]) == {"sop_analytic", "converged", "error"}
    assert 0.0 < float(rows[0]["sop_analytic"]) < 1.0


def test_mc_and_compare_points(capsys):
    assert main(["mc", "--scenario", "II", "--trials", "20000", "--seed", "3"]) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert row["n_trials"] == "20000" and float(row["std_err"]) > 0
    assert main(["compare", "--scenario", "I", "--trials", "100000", "--quad-order", "30"]) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert row["flagged"] == "false"


def test_sweep_to_file(tmp_path):
    out = tmp_path / "sweep.csv"
    args = ["sweep", "--config", "fig2a", "--axis-1", "tx_power_dbm=0:20:10", "--workers", "1", "--out", str(out)]
    assert main(args) == 0
    rows = _rows(out.read_text())
    assert [r["tx_power_dbm"] for r in rows] == ["0.00000000e+00", "1.00000000e+01", "2.00000000e+01"]
    assert "r_1" not in rows[0]


def test_preset_second_axis_and_tau_rule(capsys):
    assert main(["sweep", "--config", "fig4b", "--set", "axis_1_values=0.2,0.4", "--workers", "1"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [(r["tau_c"], r["tx_power_dbm"]) for r in rows][:2] == [
        ("2.00000000e-01", "0.00000000e+00"),
        ("2.00000000e-01", "1.00000000e+01"),
    ]
    assert len(rows) == 6


def test_error_rows_give_exit_status_1(capsys):
    code = main(["sweep", "--config", "fig2c", "--axis-1", "n_common_paths=3,12", "--workers", "1"])
    assert code == 1
    rows = _rows(capsys.readouterr().out)
    assert rows[0]["error"] == "" and rows[1]["error"]


def test_flagged_disagreement_gives_exit_status_1(capsys, monkeypatch):
    real = sweep.analytic_sop

    def off_by_a_tenth(cfg, eve, quad):
        res = real(cfg, eve, quad)
        return dataclasses.replace(res, sop=min(1.0, res.sop + 0.1), scp=max(0.0, res.scp - 0.1))

    monkeypatch.setattr(sweep, "analytic_sop", off_by_a_tenth)
    code = main(["compare", "--config", "fig2b", "--trials", "20000", "--workers", "1"])
    assert code == 1
    assert _rows(capsys.readouterr().out)[0]["flagged"] == "true"


@pytest.mark.parametrize(
    "args",
    [
        ["analytic"],
        ["analytic", "--config", "no_such_preset"],
        ["analytic", "--config", "fig2a", "--set", "colour=red"],
        ["analytic", "--config", "fig2a", "--set", "tx_power_dbm"],
        ["sweep", "--config", "fig7a"],
        ["sweep", "--config", "fig2b", "--axis-1", "tau_c=0.2,0.6"],
        ["noma-compare", "--config", "fig7a", "--tau-step", "0.3"],
    ],
)
def test_bad_arguments_give_exit_status_2(args, capsys):
    assert main(args) == 2
    assert "rsma-sop: error:" in capsys.readouterr().err


def test_noma_compare(capsys):
    code = main(["noma-compare", "--config", "fig7b", "--mode", "analytic", "--tau-step", "0.1", "--workers", "1"])
    captured = capsys.readouterr()
    assert code == 0
    assert "holds=True" in captured.err
    assert len(_rows(captured.out)) == 66


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    assert capsys.readouterr().out.split() == presets.names()


def test_module_entry_point():
    done = subprocess.run(
        [sys.executable, "-m", "rsma_sop", "analytic", "--scenario", "IV"], capture_output=True, text=True
    )
    assert done.returncode == 0
    assert done.stdout.startswith("sop_analytic,converged,error")
