import json
import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrcc import dataio as D
from jrcc import presets
from jrcc.errors import ValidationError
from jrcc.model import OperatingPoint

HEADER = "wrap_angle_rad,voltage_V,pretension_N,slip_torque_Nm,power_mW_per_cm2,label\n"


class TestMeasurements:
    def test_header_only(self):
        assert D.parse_measurements(HEADER) == []

    def test_example_row(self):
        (rec,) = D.parse_measurements(HEADER + "6.2832,300,0.05,0.5,1.2,g2.3\n")
        assert rec.wrap_angle == 6.2832
        assert rec.voltage == 300.0
        assert rec.pretension == 0.05
        assert rec.slip_torque == 0.5
        assert rec.power_areal == 12.0
        assert rec.label == "g2.3"

    def test_power_is_exact(self):
        (rec,) = D.parse_measurements(HEADER + "1,1,1,1,0.3,\n")
        assert rec.power_areal == 3.0

    def test_optional_columns(self):
        text = "voltage_V,wrap_angle_rad,slip_torque_Nm,pretension_N\n100,3,0.1,0.05\n"
        (rec,) = D.parse_measurements(text)
        assert rec.power_areal is None and rec.label == ""
        assert rec.wrap_angle == 3.0 and rec.voltage == 100.0

    def test_no_header(self):
        with pytest.raises(ValidationError):
            D.parse_measurements("# only a comment\n\n")

    def test_missing_column(self):
        with pytest.raises(ValidationError) as err:
            D.parse_measurements("wrap_angle_rad,voltage_V,pretension_N\n")
        assert err.value.field == "slip_torque_Nm"

    def test_unknown_column(self):
        with pytest.raises(ValidationError, match="temperature"):
            D.parse_measurements(HEADER.strip() + ",temperature\n")

    def test_bad_value_names_line(self):
        text = "# comment\n" + HEADER + "6.28,100,0.05,0.1,,\n6.28,abc,0.05,0.1,,\n"
        with pytest.raises(ValidationError) as err:
            D.parse_measurements(text)
        assert err.value.field == "voltage_V"
        assert "line 4" in str(err.value)

    def test_invariant_violation_names_line(self):
        with pytest.raises(ValidationError) as err:
            D.parse_measurements(HEADER + "6.28,100,-0.05,0.1,,\n")
        assert err.value.field == "pretension_N" and "line 2" in str(err.value)

    def test_ragged_row(self):
        with pytest.raises(ValidationError, match="line 2"):
            D.parse_measurements(HEADER + "6.28,100\n")

    def test_bundled_fixture(self, data_dir):
        recs = D.parse_measurements((data_dir / "power_500V.csv").read_text())
        assert recs[0].power_areal == 25.0

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(1e-3, 50), st.floats(0, 1e4), st.floats(0, 10),
                              st.floats(0, 1e3), st.one_of(st.none(), st.floats(0, 1e3))),
                    max_size=8))
    def test_round_trip(self, rows):
        from jrcc.calibration import MeasurementRecord

        recs = [MeasurementRecord(*r[:4], power_areal=r[4], label=f"r{i}") for i, r in enumerate(rows)]
        back = D.parse_measurements(D.write_measurements(recs, comment="synthetic"))
        assert len(back) == len(recs)
        for a, b in zip(recs, back):
            assert (a.wrap_angle, a.voltage, a.pretension, a.slip_torque, a.label) == \
                   (b.wrap_angle, b.voltage, b.pretension, b.slip_torque, b.label)
            if a.power_areal is None:
                assert b.power_areal is None
            else:
                assert b.power_areal == pytest.approx(a.power_areal, rel=1e-15, abs=1e-300)


class TestDesign:
    def test_reference_file(self, data_dir):
        design, op = D.parse_design((data_dir / "thick_band.cfg").read_text())
        assert design == presets.thick_band()
        assert op == presets.THICK_BAND_VOLTAGE

    def test_thin_reference(self, data_dir):
        design, op = D.parse_design((data_dir / "thin_band.cfg").read_text())
        assert design.dielectric.volume_resistivity_rho == pytest.approx(1.8181818181818182e8, rel=1e-15)
        assert design.interface.gap_g == 4.1e-6
        assert op.voltage_V == 350.0

    def test_one_wrap_is_two_pi(self, data_dir):
        base = (data_dir / "thick_band.cfg").read_text()
        a, _ = D.parse_design(base.replace("2.25 wraps", "1 wraps"))
        b, _ = D.parse_design(base.replace("2.25 wraps", f"{2 * math.pi!r} rad"))
        assert a.theta == b.theta == 2 * math.pi

    def test_negative_gap(self, data_dir):
        base = (data_dir / "thick_band.cfg").read_text()
        with pytest.raises(ValidationError) as err:
            D.parse_design(base.replace("gap = 1.9 um", "gap = -1 um"))
        assert err.value.field == "gap"

    def test_unknown_key(self, data_dir):
        base = (data_dir / "thick_band.cfg").read_text()
        with pytest.raises(ValidationError) as err:
            D.parse_design(base + "colour = red\n")
        assert err.value.field == "colour"

    def test_unknown_unit_lists_tokens(self, data_dir):
        base = (data_dir / "thick_band.cfg").read_text()
        with pytest.raises(ValidationError) as err:
            D.parse_design(base.replace("1.9 um", "1.9 furlong"))
        assert err.value.field == "gap"
        assert "furlong" in str(err.value) and "um" in str(err.value)

    def test_missing_unit(self, data_dir):
        base = (data_dir / "thick_band.cfg").read_text()
        with pytest.raises(ValidationError) as err:
            D.parse_design(base.replace("12.7 mm", "12.7"))
        assert err.value.field == "shaft_radius"

    def test_missing_key(self, data_dir):
        base = (data_dir / "thick_band.cfg").read_text()
        text = "\n".join(l for l in base.splitlines() if not l.startswith("cof"))
        with pytest.raises(ValidationError) as err:
            D.parse_design(text)
        assert err.value.field == "cof"

    def test_duplicate_key(self, data_dir):
        base = (data_dir / "thick_band.cfg").read_text()
        with pytest.raises(ValidationError, match="duplicate"):
            D.parse_design(base + "cof = 0.3\n")

    @settings(max_examples=100, deadline=None)
    @given(r=st.floats(1e-4, 1), wraps=st.floats(0, 20), t=st.floats(0, 100), h=st.floats(1e-6, 1e-3),
           g=st.floats(1e-8, 1e-4), mu=st.floats(1e-3, 1.99), v=st.floats(0, 1e4),
           rho=st.one_of(st.none(), st.floats(1e3, 1e16)))
    def test_round_trip(self, r, wraps, t, h, g, mu, v, rho):
        d = presets.thin_band()
        d = replace(d,
                    dielectric=replace(d.dielectric, volume_resistivity_rho=rho),
                    interface=replace(d.interface, gap_g=g, cof_mu=mu),
                    band=replace(d.band, thickness_h=h),
                    geometry=replace(d.geometry, shaft_radius_r=r, wrap_angle_theta=wraps * 2 * math.pi,
                                     pretension_T_hold=t))
        op = OperatingPoint(v)
        assert D.parse_design(D.write_design(d, op)) == (d, op)


def sample_table(prov=None):
    t = D.ResultTable(("wraps", "voltage_V", "torque_Nm"), provenance=prov)
    t.append((1.0, 0.0, 0.1))
    t.append((1.0, 100.0, None))
    t.append((2.0, -5.0, None), feasible=False)
    return t


class TestTables:
    def test_csv_markers(self):
        text = D.write_table(sample_table())
        lines = text.splitlines()
        assert lines[0] == "wraps,voltage_V,torque_Nm"
        assert lines[2].endswith(",N/A")
        assert lines[3].endswith(",INFEASIBLE")

    def test_json_nulls(self):
        doc = json.loads(D.write_table(sample_table(), "json"))
        assert doc["rows"][1]["torque_Nm"] is None and doc["rows"][1]["feasible"] is True
        assert doc["rows"][2]["feasible"] is False
        assert doc["metadata"] is None

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip_with_provenance(self, fmt):
        prov = D.Provenance.for_inputs("design text", b"bytes")
        t = sample_table(prov)
        back = D.read_table(D.write_table(t, fmt), fmt)
        assert back.same_data(t) and back.provenance == prov

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_empty_table(self, fmt):
        t = D.ResultTable(("a", "b"))
        back = D.read_table(D.write_table(t, fmt), fmt)
        assert back.columns == ("a", "b") and len(back) == 0

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(allow_nan=False, allow_infinity=False),
                              st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False))),
                    max_size=20),
           st.sampled_from(["csv", "json"]))
    def test_round_trip_bit_exact(self, rows, fmt):
        t = D.ResultTable(("x", "y"))
        for x, y in rows:
            t.append((x, y), feasible=y is not None or x > 0)
        back = D.read_table(D.write_table(t, fmt), fmt)
        assert back.same_data(t)
        assert [math.copysign(1, r[0]) for r in back.rows] == [math.copysign(1, r[0]) for r in t.rows]

    def test_reject_non_finite(self):
        with pytest.raises(ValidationError):
            D.ResultTable(("a",), [(math.inf,)])

    def test_infeasible_needs_empty_cell(self):
        t = D.ResultTable(("a",))
        with pytest.raises(ValidationError):
            t.append((1.0,), feasible=False)

    def test_timestamp_override(self, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        assert D.utc_timestamp() == "1970-01-01T00:00:00Z"

    def test_digest_separates_inputs(self):
        assert D.Provenance.for_inputs("ab", "c").input_sha256 != D.Provenance.for_inputs("a", "bc").input_sha256
