"""Design-space sweeps, band-strength feasibility and inverse design."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Mapping, Optional, Sequence

from . import params
from .dataio import Provenance, ResultTable
from .errors import ValidationError
from .model import (
    ClutchDesign,
    OperatingPoint,
    Prediction,
    advantage_approx,
    ea_pressure,
    governing_tension,
    max_torque,
    planar_tension,
    predict,
    specific_power,
)

MARGIN_CAP = 1e12
RATIO_WARNING = 0.05
DEFAULT_VOLTAGE_CEILING = 10_000.0


# --------------------------------------------------------------------------
# Metrics: name -> (column, extractor returning SI value or None, display divisor)
# --------------------------------------------------------------------------

def _stress_margin(pred: Prediction, design: ClutchDesign) -> float:
    if pred.band_stress == 0:
        return MARGIN_CAP
    return min(design.band.yield_stress_sigma_max / pred.band_stress, MARGIN_CAP)


METRICS: dict[str, tuple[str, Callable, float]] = {
    "t_load": ("t_load_N", lambda p, d: p.t_load, 1.0),
    "holding_torque": ("holding_torque_Nm", lambda p, d: p.holding_torque, 1.0),
    "band_stress": ("band_stress_Pa", lambda p, d: p.band_stress, 1.0),
    "band_stress_adhesive": ("band_stress_adhesive_Pa", lambda p, d: p.band_stress_adhesive, 1.0),
    "specific_shear_stress": ("specific_shear_stress_N_per_cm2", lambda p, d: p.specific_shear_stress, 1e4),
    "specific_power": ("specific_power_mW_per_cm2", lambda p, d: p.specific_power, 10.0),
    "coulomb_pressure": ("coulomb_pressure_Pa", lambda p, d: p.pressures.coulomb_pressure, 1.0),
    "jr_pressure": ("jr_pressure_Pa", lambda p, d: p.pressures.jr_pressure, 1.0),
    "beta_total": ("beta_total_Pa", lambda p, d: p.pressures.beta_total, 1.0),
    "alpha_per_radian": ("alpha_N_per_rad", lambda p, d: p.pressures.alpha_per_radian, 1.0),
    "advantage_exact": ("advantage_exact", lambda p, d: p.advantage_exact, 1.0),
    "advantage_approx": ("advantage_approx", lambda p, d: p.advantage_approx, 1.0),
    "ratio_term": ("ratio_term", lambda p, d: p.ratio_term, 1.0),
    "planar_tension": ("planar_tension_N", lambda p, d: p.planar_tension, 1.0),
    "planar_specific_shear_stress": (
        "planar_specific_shear_stress_N_per_cm2", lambda p, d: p.planar_specific_shear_stress, 1e4),
    "stress_margin": ("stress_margin", _stress_margin, 1.0),
}

DEFAULT_METRICS = ("t_load", "holding_torque", "specific_shear_stress", "band_stress", "stress_margin")


@dataclass(frozen=True)
class Axis:
    """One sweep dimension: SI ``values`` for parameter ``key``, shown as ``display`` in column ``label``."""

    key: str
    values: tuple
    label: str
    display: tuple

    @classmethod
    def si(cls, key: str, values: Sequence[float]) -> "Axis":
        from .units import SI_TOKEN, column_suffix

        key = params.canonical(key)
        unit = SI_TOKEN[params.PARAMS[key].kind]
        label = f"{key}_{column_suffix(unit)}" if unit else key
        vals = tuple(float(v) for v in values)
        return cls(key, vals, label, vals)

    @classmethod
    def wraps(cls, values: Sequence[float]) -> "Axis":
        vals = tuple(float(v) for v in values)
        return cls("wrap_angle", tuple(v * 2.0 * math.pi for v in vals), "wraps", vals)


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple
    metrics: tuple = DEFAULT_METRICS
    include_jr: bool = True

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if not self.axes:
            raise ValidationError("axes", "a sweep needs at least one axis")
        for ax in self.axes:
            if not ax.values:
                raise ValidationError(ax.label, "axis has no values")
        keys = [ax.key for ax in self.axes]
        if len(set(keys)) != len(keys):
            raise ValidationError("axes", "each parameter may appear on one axis only")
        for m in self.metrics:
            if m not in METRICS:
                raise ValidationError("metrics", f"unknown metric {m!r}; known: {', '.join(METRICS)}")

    @property
    def columns(self) -> tuple:
        return tuple(ax.label for ax in self.axes) + tuple(METRICS[m][0] for m in self.metrics)


def _sweep_row(combo, base: ClutchDesign, op: OperatingPoint, spec: SweepSpec):
    idx = combo
    overrides = {ax.key: ax.values[i] for ax, i in zip(spec.axes, idx)}
    head = [ax.display[i] for ax, i in zip(spec.axes, idx)]
    try:
        design, point = params.apply(base, op, overrides)
        pred = predict(point, design, include_jr=spec.include_jr)
    except ValidationError:
        return head + [None] * len(spec.metrics), False
    cells = []
    for m in spec.metrics:
        _, extract, divisor = METRICS[m]
        v = extract(pred, design)
        cells.append(None if v is None else v / divisor)
    return head + cells, True


def run_sweep(base: ClutchDesign, op: OperatingPoint, spec: SweepSpec, workers: int = 1,
              provenance: Provenance | None = None) -> ResultTable:
    """Evaluate ``predict`` over the Cartesian product of the axes, in lexicographic axis order.

    Combinations that violate a field invariant produce an infeasible row with
    empty metrics rather than being dropped.
    """
    combos = list(itertools.product(*(range(len(ax.values)) for ax in spec.axes)))
    fn = partial(_sweep_row, base=base, op=op, spec=spec)
    if workers > 1 and len(combos) > 1:
        chunk = max(1, len(combos) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, combos, chunksize=chunk))
    else:
        results = [fn(c) for c in combos]
    table = ResultTable(spec.columns, provenance=provenance)
    for row, ok in results:
        table.append(row, ok)
    return table


# --------------------------------------------------------------------------
# Constraints
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintReport:
    exact_stress: float
    adhesive_stress: float
    allowable_stress: float
    stress_margin: float
    feasible: bool
    ratio_term: Optional[float]
    holding_torque: float
    max_torque: float
    warnings: tuple = field(default=())


def check_constraints(design: ClutchDesign, op: OperatingPoint, safety_factor: float = 1.0) -> ConstraintReport:
    """Band stress at the slip-limit tension against yield/SF; infeasibility is reported, not raised."""
    if not safety_factor >= 1:
        raise ValidationError("safety_factor", f"must be >= 1, got {safety_factor!r}")
    pressures = ea_pressure(op, design)
    tension = governing_tension(op, design)
    exact = tension / (design.l * design.h)
    adhesive = design.r / design.h * pressures.beta_total * math.expm1(design.mu * design.theta)
    allowable = design.band.yield_stress_sigma_max / safety_factor
    margin = MARGIN_CAP if exact == 0 else min(allowable / exact, MARGIN_CAP)
    warnings = []
    if pressures.beta_total > 0:
        ratio = design.t_hold / (design.l * design.r * pressures.beta_total)
        if ratio > RATIO_WARNING:
            warnings.append(
                f"pretension ratio T_hold/(l*r*beta) = {ratio:.4g} exceeds {RATIO_WARNING}; "
                "the disengaged clutch will drag"
            )
    else:
        ratio = None
    feasible = margin >= 1.0
    if not feasible:
        warnings.append(f"band stress {exact:.4g} Pa exceeds allowable {allowable:.4g} Pa")
    return ConstraintReport(
        exact_stress=exact,
        adhesive_stress=adhesive,
        allowable_stress=allowable,
        stress_margin=margin,
        feasible=feasible,
        ratio_term=ratio,
        holding_torque=tension * design.r,
        max_torque=max_torque(design.band, design.r, allowable),
        warnings=tuple(warnings),
    )


# --------------------------------------------------------------------------
# Inverse design
# --------------------------------------------------------------------------

def bisect_increasing(f: Callable[[float], float], target: float, lo: float, hi: float,
                      tol: float | None = None) -> tuple[float, float]:
    """Shrink [lo, hi] with f(lo) < target <= f(hi) for increasing ``f``.

    Stops when hi - lo <= tol, or at float resolution when ``tol`` is None.
    """
    while True:
        if tol is not None and hi - lo <= tol:
            return lo, hi
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return lo, hi
        if f(mid) >= target:
            hi = mid
        else:
            lo = mid


def _with_theta(design: ClutchDesign, theta: float) -> ClutchDesign:
    return params.apply(design, OperatingPoint(0.0), {"wrap_angle": theta})[0]


@dataclass(frozen=True)
class WrapSolution:
    theta: Optional[float]
    feasible: bool
    reason: str
    torque: Optional[float]
    max_torque: float


def min_wrap_for_torque(design: ClutchDesign, op: OperatingPoint, target_torque: float, theta_max: float,
                        tol: float = 1e-6) -> WrapSolution:
    """Smallest wrap angle whose slip torque reaches ``target_torque``.

    ``reason`` is ``"ok"``, ``"tension"`` (not reachable within ``theta_max``)
    or ``"strength"`` (reachable, but beyond the band's yield torque).
    """
    if not target_torque > 0:
        raise ValidationError("target_torque", "must be > 0")
    if not theta_max > 0:
        raise ValidationError("theta_max", "must be > 0")

    def torque(theta):
        return governing_tension(op, _with_theta(design, theta)) * design.r

    strength = max_torque(design.band, design.r)
    if torque(0.0) >= target_torque:
        theta = 0.0
    elif torque(theta_max) < target_torque:
        return WrapSolution(None, False, "tension", torque(theta_max), strength)
    else:
        _, theta = bisect_increasing(torque, target_torque, 0.0, theta_max, tol)
    if target_torque > strength:
        return WrapSolution(theta, False, "strength", torque(theta), strength)
    return WrapSolution(theta, True, "ok", torque(theta), strength)


@dataclass(frozen=True)
class VoltageLimit:
    voltage: float
    limited_by: str  # "stress", "ceiling" or "pretension"
    warnings: tuple = field(default=())


def max_voltage_for_stress(design: ClutchDesign, safety_factor: float = 1.0,
                           v_ceiling: float = DEFAULT_VOLTAGE_CEILING, method: str = "closed_form",
                           vtol: float | None = None) -> VoltageLimit:
    """Largest voltage keeping the exact band stress within yield/SF.

    ``closed_form`` uses β ∝ V²; ``bisection`` searches the exact stress.
    The bisection runs to float resolution unless ``vtol`` is given.
    """
    if design.theta <= 0:
        raise ValidationError("wrap_angle", "must be > 0 for a voltage limit")
    if not safety_factor >= 1:
        raise ValidationError("safety_factor", f"must be >= 1, got {safety_factor!r}")
    allowable_tension = design.band.yield_stress_sigma_max / safety_factor * design.l * design.h
    mt = design.mu * design.theta
    base = design.t_hold * math.exp(mt)
    if base > allowable_tension:
        return VoltageLimit(0.0, "pretension", ("pretension alone exceeds the allowable band stress",))

    if method == "closed_form":
        per_volt2 = ea_pressure(OperatingPoint(1.0), design).alpha_per_radian * math.expm1(mt)
        v = math.sqrt((allowable_tension - base) / per_volt2)
    elif method == "bisection":
        def tension(v):
            return governing_tension(OperatingPoint(v), design)

        if tension(v_ceiling) <= allowable_tension:
            return VoltageLimit(v_ceiling, "ceiling")
        v, _ = _bisect_last_ok(tension, allowable_tension, 0.0, v_ceiling, vtol)
    else:
        raise ValidationError("method", f"unknown method {method!r}")
    if v >= v_ceiling:
        return VoltageLimit(v_ceiling, "ceiling")
    return VoltageLimit(v, "stress")


def _bisect_last_ok(f, limit, lo, hi, tol):
    """For increasing f with f(lo) <= limit < f(hi), shrink to the crossing."""
    while True:
        if tol is not None and hi - lo <= tol:
            return lo, hi
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return lo, hi
        if f(mid) <= limit:
            lo = mid
        else:
            hi = mid


# --------------------------------------------------------------------------
# Comparison tables
# --------------------------------------------------------------------------

COMPARE_COLUMNS = (
    "voltage_V", "wrap_angle_rad", "wraps", "capstan_tension_N", "planar_tension_N",
    "advantage_exact", "advantage_approx", "ratio_term",
)


def compare_planar(design: ClutchDesign, voltages: Sequence[float], thetas: Sequence[float],
                   provenance: Provenance | None = None) -> ResultTable:
    """Capstan vs equal-area planar clutch over a (V, θ) grid.

    At θ = 0 the advantage is reported by its limit (1); the exact form is
    then only finite without pretension. At 0 V the exact form is undefined.
    """
    if len(voltages) == 0 or len(thetas) == 0:
        raise ValidationError("grid", "voltage and wrap-angle grids must be non-empty")
    table = ResultTable(COMPARE_COLUMNS, provenance=provenance)
    for v in voltages:
        op = OperatingPoint(float(v))
        for theta in thetas:
            d = _with_theta(design, float(theta))
            cap = governing_tension(op, d)
            flat = planar_tension(op, d)
            beta = ea_pressure(op, d).beta_total
            mt = d.mu * d.theta
            approx = 1.0 if mt == 0 else advantage_approx(mt)
            if beta > 0:
                ratio = d.t_hold / (d.l * d.r * beta)
                if mt > 0:
                    exact = (ratio * math.exp(mt) + math.expm1(mt)) / mt
                else:
                    exact = 1.0 if d.t_hold == 0 else None
            else:
                ratio = exact = None
            table.append((op.voltage_V, d.theta, d.theta / (2 * math.pi), cap, flat, exact, approx, ratio))
    return table


EFFICIENCY_COLUMNS = (
    "wraps", "voltage_V", "specific_power_mW_per_cm2", "specific_shear_stress_N_per_cm2",
    "planar_specific_shear_stress_N_per_cm2",
)


def efficiency_curve(design: ClutchDesign, voltages: Sequence[float], wraps: Sequence[float] = (0.5, 1, 2, 3),
                     gaps: Mapping[float, float] | None = None, planar_gap: float = 2.3e-6,
                     planar_cof: float = 0.2, provenance: Provenance | None = None) -> ResultTable:
    """Specific tension against specific power per wrap count, with a planar reference column.

    ``gaps`` optionally maps a wrap count to its own gap. The planar
    reference uses ``planar_gap`` and ``planar_cof`` and is θ-independent.
    """
    if design.dielectric.volume_resistivity_rho is None:
        raise ValidationError(
            "volume_resistivity",
            "efficiency curves need the dielectric resistivity; set it or estimate it with fit_resistivity",
        )
    planar_design = params.apply(design, OperatingPoint(0.0), {"gap": planar_gap, "cof": planar_cof})[0]
    table = ResultTable(EFFICIENCY_COLUMNS, provenance=provenance)
    for w in wraps:
        overrides = {"wrap_angle": float(w) * 2 * math.pi}
        if gaps and w in gaps:
            overrides["gap"] = gaps[w]
        d = params.apply(design, OperatingPoint(0.0), overrides)[0]
        for v in voltages:
            op = OperatingPoint(float(v))
            t = governing_tension(op, d)
            planar_stress = planar_design.mu * ea_pressure(op, planar_design).beta_total
            table.append((
                float(w), op.voltage_V, specific_power(op, d.dielectric) / 10.0,
                t / d.contact_area / 1e4, planar_stress / 1e4,
            ))
    return table
