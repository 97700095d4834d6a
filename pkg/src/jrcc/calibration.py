"""Parameter estimation from slip-test measurements.

Each fit returns a :class:`FitResult`. Records carry their own wrap angle,
voltage and pretension, which override the corresponding design values, so
an effective pretension for a stiff band can be supplied per record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .errors import FitError, ValidationError
from .model import ClutchDesign, _finite, _non_negative, _positive

DEFAULT_GAP_BOUNDS = (0.1e-6, 100e-6)


@dataclass(frozen=True)
class MeasurementRecord:
    wrap_angle: float
    voltage: float
    pretension: float
    slip_torque: float
    power_areal: Optional[float] = None  # W/m²
    label: str = ""

    def __post_init__(self):
        _positive("wrap_angle_rad", self.wrap_angle)
        _non_negative("voltage_V", self.voltage)
        _non_negative("pretension_N", self.pretension)
        _non_negative("slip_torque_Nm", self.slip_torque)
        if self.power_areal is not None:
            _non_negative("power_mW_per_cm2", self.power_areal)


@dataclass(frozen=True)
class FitResult:
    parameter_name: str
    value: float
    residual_sse: float
    pearson_r: Optional[float]
    n_records: int
    bounds_used: tuple
    at_bound: bool = False
    derived: dict = field(default_factory=dict)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation using exactly rounded sums (independent of input order)."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n = len(x)
    if n != len(y) or n < 2:
        raise FitError("correlation needs at least two paired values")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0 or syy == 0:
        raise FitError("correlation undefined: one series has zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def _record_arrays(records):
    theta = np.array([rec.wrap_angle for rec in records])
    volts = np.array([rec.voltage for rec in records])
    t_hold = np.array([rec.pretension for rec in records])
    torque = np.array([rec.slip_torque for rec in records])
    return theta, volts, t_hold, torque


def predicted_torques(records: Sequence[MeasurementRecord], design: ClutchDesign,
                      gap: float | None = None) -> np.ndarray:
    """Model slip torque for each record, using the record's θ, V and pretension."""
    theta, volts, t_hold, _ = _record_arrays(records)
    g = design.interface.gap_g if gap is None else gap
    d = design.dielectric
    tension = _kernels.governing_tension_batch(
        volts, g, d.thickness_d, d.rel_permittivity_eps_d, design.interface.gas_permittivity_eps_g,
        design.mu, theta, design.l, design.r, t_hold,
    )
    return tension * design.r


def simulate_records(design: ClutchDesign, voltages: Sequence[float], pretension: float | None = None,
                     label: str = "model") -> list[MeasurementRecord]:
    """Noise-free records generated by the model at the design's wrap angle."""
    t_hold = design.t_hold if pretension is None else pretension
    probe = [MeasurementRecord(design.theta, float(v), t_hold, 0.0) for v in voltages]
    torques = predicted_torques(probe, design)
    return [replace(rec, slip_torque=float(tau), label=label) for rec, tau in zip(probe, torques)]


def _maybe_pearson(x, y):
    if len(x) < 2:
        return None
    try:
        return pearson(x, y)
    except FitError:
        return None


# --------------------------------------------------------------------------
# Coefficient of friction
# --------------------------------------------------------------------------

def fit_cof(records: Sequence[MeasurementRecord], r: float) -> FitResult:
    """Friction coefficient from unpowered slip tests, μ = mean ln(T/T_hold)/θ."""
    records = list(records)
    if not records:
        raise ValidationError("records", "need at least one record")
    _positive("shaft_radius", r)
    theta0 = records[0].wrap_angle
    for n, rec in enumerate(records, 1):
        if rec.voltage != 0:
            raise ValidationError("voltage_V", f"record {n}: friction fits need V = 0, got {rec.voltage!r}")
        if rec.pretension <= 0:
            raise ValidationError("pretension_N", f"record {n}: must be > 0 for the log fit")
        if rec.slip_torque <= 0:
            raise ValidationError("slip_torque_Nm", f"record {n}: must be > 0 for the log fit")
        if rec.wrap_angle != theta0:
            raise ValidationError("wrap_angle_rad", f"record {n}: all records must share one wrap angle")

    logs = [math.log(rec.slip_torque / r / rec.pretension) for rec in records]
    mu = math.fsum(logs) / (len(logs) * theta0)
    if not 0 < mu < 2:
        raise FitError(f"fitted friction coefficient {mu:.4g} is outside (0, 2)")
    sse = math.fsum((lg - mu * theta0) ** 2 for lg in logs)
    predicted = [rec.pretension * math.exp(mu * theta0) * r for rec in records]
    measured = [rec.slip_torque for rec in records]
    return FitResult("cof", mu, sse, _maybe_pearson(predicted, measured), len(records), (0.0, 2.0))


# --------------------------------------------------------------------------
# Air gap
# --------------------------------------------------------------------------

def fit_gap(records: Sequence[MeasurementRecord], design_without_gap: ClutchDesign,
            bounds: tuple = DEFAULT_GAP_BOUNDS, xatol: float = 1e-10) -> FitResult:
    """Bounded scalar least-squares fit of the air gap, in torque space.

    The bounds are scanned on a combined log/linear grid to bracket the
    minimum, which is then refined with bounded Brent (golden section plus
    parabolic steps). The gap already set in ``design_without_gap`` is ignored.
    """
    records = list(records)
    if len(records) < 3:
        raise ValidationError("records", f"gap fit needs at least 3 records, got {len(records)}")
    if len({rec.wrap_angle for rec in records}) != 1:
        raise ValidationError("wrap_angle_rad", "gap fit records must share one wrap angle")
    lo, hi = (float(b) for b in bounds)
    if not 0 < lo < hi:
        raise ValidationError("bounds", f"need 0 < lo < hi, got {bounds!r}")
    if all(rec.voltage == 0 for rec in records):
        raise FitError("gap unidentifiable: every record is at 0 V, so the model does not depend on the gap")

    measured = np.array([rec.slip_torque for rec in records])

    def sse(g):
        res = predicted_torques(records, design_without_gap, gap=g) - measured
        return float(np.dot(res, res))

    grid = np.unique(np.concatenate([np.geomspace(lo, hi, 257), np.linspace(lo, hi, 65)]))
    values = np.array([sse(g) for g in grid])
    if not np.all(np.isfinite(values)):
        raise FitError("gap objective is not finite somewhere inside the bounds")
    if np.ptp(values) == 0:
        raise FitError("gap unidentifiable: objective is constant across the bounds")

    k = int(np.argmin(values))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(sse, bounds=(a, b), method="bounded", options={"xatol": xatol})
    g_best, f_best = float(res.x), float(res.fun)
    if not f_best <= values[k]:
        g_best, f_best = float(grid[k]), float(values[k])

    at_bound = (g_best - lo) <= 2 * xatol or (hi - g_best) <= 2 * xatol
    predicted = predicted_torques(records, design_without_gap, gap=g_best)
    return FitResult(
        "gap", g_best, f_best, _maybe_pearson(predicted, measured), len(records), (lo, hi), at_bound,
    )


# --------------------------------------------------------------------------
# Leakage resistivity
# --------------------------------------------------------------------------

def fit_resistivity(records: Sequence[MeasurementRecord], d) -> FitResult:
    """Least-squares ρ for P = V²/(ρ·d); one record gives an exact inversion."""
    usable = [rec for rec in records if rec.power_areal is not None and rec.voltage > 0]
    if not usable:
        raise ValidationError("records", "need at least one record with power and voltage > 0")
    v2 = [rec.voltage**2 for rec in usable]
    p = [rec.power_areal for rec in usable]
    num = math.fsum(pi * vi for pi, vi in zip(p, v2))
    if num <= 0:
        raise FitError("all measured powers are zero: resistivity is unbounded")
    if len(usable) == 1:
        conductance = p[0] / v2[0]
    else:
        conductance = num / math.fsum(vi * vi for vi in v2)
    rho_d = 1.0 / conductance
    rho = rho_d / d.thickness_d
    predicted = [vi / rho_d for vi in v2]
    sse = math.fsum((a - b) ** 2 for a, b in zip(predicted, p))
    return FitResult(
        "volume_resistivity", rho, sse, _maybe_pearson(predicted, p), len(usable), (0.0, math.inf),
        derived={"rho_times_d": rho_d},
    )


def goodness_of_fit(records: Sequence[MeasurementRecord], design: ClutchDesign) -> float:
    """Pearson r between predicted and measured slip torques."""
    records = list(records)
    if len(records) < 2:
        raise ValidationError("records", "goodness of fit needs at least 2 records")
    predicted = predicted_torques(records, design)
    return pearson(predicted, [rec.slip_torque for rec in records])


def with_gap(design: ClutchDesign, gap: float) -> ClutchDesign:
    _finite("gap", gap)
    return replace(design, interface=replace(design.interface, gap_g=gap))
