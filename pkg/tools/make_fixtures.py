"""Regenerate the model-generated measurement fixtures in src/jrcc/data/."""

import math
from pathlib import Path

from jrcc import presets
from jrcc.calibration import MeasurementRecord, simulate_records
from jrcc.dataio import write_measurements

OUT = Path(__file__).resolve().parents[1] / "src" / "jrcc" / "data"


def main():
    design = presets.thin_band(wraps=1.0, gap=2.3e-6)
    recs = simulate_records(design, range(100, 501, 50), label="gap2.3um")
    (OUT / "gap_fit_2p3um.csv").write_text(write_measurements(
        recs, "synthetic: thin band, 1 wrap, gap 2.3 um, cof 0.2, pretension 0.05 N"))

    theta = 6 * math.pi
    recs = []
    for k in range(1, 14):
        t_hold = 0.1 * k
        recs.append(MeasurementRecord(theta, 0.0, t_hold, t_hold * math.exp(0.2 * theta) * presets.SHAFT_RADIUS,
                                      label=f"{10 * k} g"))
    (OUT / "cof_fit.csv").write_text(write_measurements(recs, "synthetic: 0 V, 3 wraps, cof 0.2"))

    rec = MeasurementRecord(2.25 * 2 * math.pi, 500.0, 2.0, 7.1, power_areal=25.0, label="thick band")
    (OUT / "power_500V.csv").write_text(write_measurements([rec], "single power point: 2.5 mW/cm2 at 500 V"))


if __name__ == "__main__":
    main()
