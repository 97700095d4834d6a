"""Reference clutch configurations from the characterised prototype.

Band width of the thick band is not published; 10 mm (same as the thin
shim) is assumed.
"""

from __future__ import annotations

import math

from .model import (
    BandSpec,
    CapstanGeometry,
    ClutchDesign,
    DielectricSpec,
    InterfaceSpec,
    OperatingPoint,
)

WRAP = 2.0 * math.pi

SHAFT_RADIUS = 12.7e-3
BAND_WIDTH = 10e-3
PBI_THICKNESS = 55e-6
PBI_PERMITTIVITY = 3.9
COF = 0.20
# tensile failure of the 25.4 µm shim at ~2.5 N·m: 2.5 / (r·l·h)
SNAP_TORQUE = 2.5
SNAP_YIELD_STRESS = 7.8e8

# fitted gaps per wrap count for the unpolished 25.4 µm band
FITTED_GAPS = {
    0.5: 2.3e-6,
    1.0: 2.3e-6,
    1.5: 2.9e-6,
    2.0: 2.9e-6,
    2.5: 3.6e-6,
    3.0: 4.1e-6,
}
POLISHED_WRAPS = 2.25
POLISHED_GAP = 1.9e-6


def pbi(resistivity: float | None = None) -> DielectricSpec:
    return DielectricSpec(PBI_THICKNESS, PBI_PERMITTIVITY, resistivity, name="PBI")


def thick_band(wraps: float = POLISHED_WRAPS, gap: float = POLISHED_GAP,
               pretension: float = 2.0) -> ClutchDesign:
    """Polished 76.2 µm band, 2 N pretension."""
    return ClutchDesign(
        dielectric=pbi(),
        interface=InterfaceSpec(gap_g=gap, cof_mu=COF),
        band=BandSpec(thickness_h=76.2e-6, width_l=BAND_WIDTH, yield_stress_sigma_max=SNAP_YIELD_STRESS),
        geometry=CapstanGeometry(SHAFT_RADIUS, wraps * WRAP, pretension),
    )


def thin_band(wraps: float = 3.0, gap: float | None = None, pretension: float = 0.05) -> ClutchDesign:
    """Unpolished 25.4 µm shim, 0.05 N pretension; gap defaults to the fitted one for ``wraps``."""
    if gap is None:
        gap = FITTED_GAPS.get(wraps, FITTED_GAPS[3.0])
    return ClutchDesign(
        dielectric=pbi(),
        interface=InterfaceSpec(gap_g=gap, cof_mu=COF),
        band=BandSpec(thickness_h=25.4e-6, width_l=BAND_WIDTH, yield_stress_sigma_max=SNAP_YIELD_STRESS),
        geometry=CapstanGeometry(SHAFT_RADIUS, wraps * WRAP, pretension),
    )


THICK_BAND_VOLTAGE = OperatingPoint(500.0)
THIN_BAND_VOLTAGE = OperatingPoint(350.0)
