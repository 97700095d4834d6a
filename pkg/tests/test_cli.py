import json
import subprocess
import sys

import pytest

from jrcc import dataio
from jrcc.cli import main, parse_values
from jrcc.errors import ValidationError


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def fields(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            k, _, v = line.partition(" = ")
            out[k] = v
    return out


@pytest.fixture
def thick_cfg(data_dir):
    return data_dir / "thick_band.cfg"


@pytest.fixture
def thin_cfg(data_dir):
    return data_dir / "thin_band.cfg"


class TestPredict:
    def test_reference(self, capsys, thick_cfg):
        code, out, _ = run(capsys, "predict", thick_cfg)
        assert code == 0
        f = fields(out)
        assert float(f["holding_torque"].split()[0]) == pytest.approx(8.4, abs=0.05)
        assert 25 <= float(f["specific_shear_stress"].split()[0]) <= 40
        assert "note:" in out and "yield" in out

    def test_zero_voltage(self, capsys, thick_cfg):
        code, out, _ = run(capsys, "predict", thick_cfg, "--set", "voltage=0 V")
        assert code == 0
        f = fields(out)
        assert f["advantage_exact"] == "N/A"
        assert float(f["jr_pressure"].split()[0]) == 0.0

    def test_zero_wrap(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "predict", thin_cfg, "--set", "wrap_angle=0 rad", "--format", "csv")
        assert code == 0
        table = dataio.read_table(out)
        assert table.column("specific_shear_stress_N_per_cm2") == [None]
        assert table.column("t_load_N") == [0.05]
        assert "N/A" in out

    def test_json(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "predict", thin_cfg, "--format", "json")
        doc = json.loads(out)
        assert code == 0 and len(doc["metadata"]["input_sha256"]) == 64

    def test_invalid_override(self, capsys, thin_cfg):
        code, _, err = run(capsys, "predict", thin_cfg, "--set", "gap=-1 um")
        assert code == 2 and "gap" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "predict", tmp_path / "nope.cfg")
        assert code == 2 and "cannot read" in err


class TestFit:
    def test_gap(self, capsys, data_dir, thin_cfg, tmp_path):
        curve = tmp_path / "curve.csv"
        code, out, _ = run(capsys, "fit", "gap", "--measurements", data_dir / "gap_fit_2p3um.csv",
                           "--design", thin_cfg, "--set", "wrap_angle=1 wraps", "--emit-curve", curve)
        assert code == 0
        gap_um = float(fields(out)["gap"].split()[0])
        assert gap_um == pytest.approx(2.3, rel=1e-3)
        table = dataio.read_table(curve.read_text())
        assert table.column("predicted_torque_Nm") == pytest.approx(table.column("measured_torque_Nm"), rel=1e-4)

    def test_gap_at_bound(self, capsys, data_dir, thin_cfg):
        code, _, err = run(capsys, "fit", "gap", "--measurements", data_dir / "gap_fit_2p3um.csv",
                           "--design", thin_cfg, "--bounds", "3:10 um")
        assert code == 3 and "bound" in err

    def test_cof(self, capsys, data_dir, thin_cfg):
        code, out, _ = run(capsys, "fit", "cof", "--measurements", data_dir / "cof_fit.csv", "--design", thin_cfg)
        assert code == 0
        assert float(fields(out)["cof"]) == pytest.approx(0.2, abs=5e-4)

    def test_resistivity(self, capsys, data_dir, thin_cfg):
        code, out, _ = run(capsys, "fit", "resistivity", "--measurements", data_dir / "power_500V.csv",
                           "--design", thin_cfg)
        assert code == 0
        assert float(fields(out)["rho_times_d"].split()[0]) == pytest.approx(1e4, rel=1e-12)

    def test_fit_failure(self, capsys, data_dir, thin_cfg, tmp_path):
        m = tmp_path / "zero.csv"
        m.write_text("wrap_angle_rad,voltage_V,pretension_N,slip_torque_Nm\n" +
                     "".join(f"6.28,0,{t},0.01\n" for t in (0.05, 0.06, 0.07)))
        code, _, err = run(capsys, "fit", "gap", "--measurements", m, "--design", thin_cfg)
        assert code == 3 and "unidentifiable" in err

    def test_bad_measurements(self, capsys, thin_cfg, tmp_path):
        m = tmp_path / "bad.csv"
        m.write_text("wrap_angle_rad,voltage_V,pretension_N,slip_torque_Nm\n6.28,x,0.05,0.01\n")
        code, _, err = run(capsys, "fit", "cof", "--measurements", m, "--design", thin_cfg)
        assert code == 2 and "line 2" in err


class TestSweep:
    def test_single_row(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "sweep", thin_cfg, "--axis", "voltage=0:0:0 V", "--metric", "holding_torque")
        assert code == 0
        table = dataio.read_table(out)
        assert table.columns == ("voltage_V", "holding_torque_Nm") and len(table) == 1

    def test_grid_order_and_units(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "sweep", thin_cfg, "--axis", "wraps=0.5,1", "--axis", "voltage=0:0.5:0.25 kV",
                           "--metric", "t_load")
        table = dataio.read_table(out)
        assert table.columns == ("wraps", "voltage_kV", "t_load_N")
        assert [r[:2] for r in table.rows] == [(0.5, 0.0), (0.5, 0.25), (0.5, 0.5),
                                               (1.0, 0.0), (1.0, 0.25), (1.0, 0.5)]

    @pytest.mark.parametrize("axis", ["voltage", "voltage=0:10", "voltage=0:10:1 furlong", "colour=1:2:1 V",
                                      "voltage=0:10:3 V", "wraps=1:2:1 rad"])
    def test_malformed_axis(self, capsys, thin_cfg, axis):
        code, _, err = run(capsys, "sweep", thin_cfg, "--axis", axis)
        assert code == 2 and err.startswith("error:")

    def test_unknown_metric(self, capsys, thin_cfg):
        code, _, _ = run(capsys, "sweep", thin_cfg, "--axis", "voltage=0:1:1 V", "--metric", "bogus")
        assert code == 2

    def test_parse_values_exact(self):
        vals = parse_values("0:1:0.1", "x")
        assert len(vals) == 11 and float(vals[3]) == 0.3
        with pytest.raises(ValidationError):
            parse_values("1:0:0.1", "x")


class TestCompare:
    def test_wraps(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "compare", thin_cfg, "--wraps", "0:3:1")
        assert code == 0
        approx = dataio.read_table(out).column("advantage_approx")
        assert approx[0] == 1.0
        assert approx[3] == pytest.approx(11.2406, abs=1e-4)
        assert all(a >= 1 for a in approx)

    def test_alias_and_voltages(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "advantage", thin_cfg, "--voltages", "100,200 V", "--thetas", "1,2 rad",
                           "--format", "json")
        assert code == 0 and len(json.loads(out)["rows"]) == 4


class TestCheck:
    SNAP = ("--set", "yield_stress=775001550.0031 Pa", "--set", "voltage=361.6 V")

    def test_snap_infeasible(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "check", thin_cfg, *self.SNAP)
        assert code == 4
        f = fields(out)
        assert f["feasible"] == "no"
        assert float(f["stress_margin"]) == pytest.approx(1.0, abs=1e-3)

    def test_idle_feasible(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "check", thin_cfg, "--set", "voltage=0 V", "--set", "pretension=0 N")
        assert code == 0
        assert "(capped)" in fields(out)["stress_margin"]

    def test_ratio_warning(self, capsys, thick_cfg):
        code, out, _ = run(capsys, "check", thick_cfg, "--set", "yield_stress=2 GPa")
        assert code == 0 and "warning:" in out and "ratio" in out

    def test_safety_factor(self, capsys, thin_cfg):
        code, _, _ = run(capsys, "check", thin_cfg, "--safety-factor", "100")
        assert code == 4


class TestSolve:
    def test_min_wrap(self, capsys, thick_cfg):
        code, out, _ = run(capsys, "solve", "min-wrap", thick_cfg, "--target-torque", "7.1 N*m",
                           "--set", "yield_stress=2 GPa")
        assert code == 0
        wraps = float(out.split("(")[1].split()[0])
        assert 2.0 <= wraps <= 2.25

    def test_min_wrap_strength(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "solve", "min-wrap", thin_cfg, "--target-torque", "3 N*m")
        assert code == 4 and "strength" in out

    def test_max_voltage(self, capsys, thin_cfg):
        code, out, _ = run(capsys, "solve", "max-voltage", thin_cfg, "--set", "yield_stress=775001550.0031 Pa")
        assert code == 0
        assert float(fields(out)["voltage"].split()[0]) == pytest.approx(361.5576, abs=1e-3)


class TestEntryPoint:
    def test_help_lists_units(self):
        res = subprocess.run([sys.executable, "-m", "jrcc", "sweep", "--help"], capture_output=True, text=True)
        assert res.returncode == 0
        for token in ("um", "wraps", "N*m", "kV", "ohm*cm", "mW/cm2"):
            assert token in res.stdout

    def test_usage_error(self):
        res = subprocess.run([sys.executable, "-m", "jrcc", "frobnicate"], capture_output=True, text=True)
        assert res.returncode == 2

    def test_output_file(self, thin_cfg, tmp_path):
        out = tmp_path / "t.csv"
        res = subprocess.run([sys.executable, "-m", "jrcc", "sweep", str(thin_cfg), "--axis", "voltage=0:100:50 V",
                              "-o", str(out)], capture_output=True, text=True)
        assert res.returncode == 0 and res.stdout == ""
        assert len(dataio.read_table(out.read_text())) == 3
