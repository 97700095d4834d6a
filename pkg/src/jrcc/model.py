"""Electrostatic capstan clutch physics.

All quantities are SI (m, Pa, N, V, rad, Ω·m). The model combines the
Coulomb and Johnsen-Rahbek electroadhesive pressures into a per-radian
adhesive force ``alpha = beta * l * r`` and feeds it through the capstan
relation ``T_load = T_hold e^(μθ) + alpha (e^(μθ) - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from ._kernels import EPS0
from .errors import ValidationError

__all__ = [
    "EPS0",
    "DielectricSpec",
    "InterfaceSpec",
    "BandSpec",
    "CapstanGeometry",
    "ClutchDesign",
    "OperatingPoint",
    "PressureBreakdown",
    "Advantage",
    "BandStress",
    "Prediction",
    "coulomb_pressure",
    "jr_pressure",
    "ea_pressure",
    "capstan_tension",
    "es_capstan_tension",
    "governing_tension",
    "planar_tension",
    "advantage",
    "advantage_approx",
    "band_stress",
    "max_torque",
    "specific_shear_stress",
    "specific_power",
    "ode_tension_oracle",
    "ode_tension_oracle_batch",
    "predict",
]


def _finite(name, value):
    if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
        raise ValidationError(name, f"must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(name, f"must be finite, got {value!r}")


def _positive(name, value):
    _finite(name, value)
    if value <= 0:
        raise ValidationError(name, f"must be > 0, got {value!r}")


def _non_negative(name, value):
    _finite(name, value)
    if value < 0:
        raise ValidationError(name, f"must be >= 0, got {value!r}")


# --------------------------------------------------------------------------
# Domain types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DielectricSpec:
    """Dielectric layer bonded to the shaft.

    ``volume_resistivity_rho`` may be left as None when no leakage model is
    needed; power metrics are then unavailable until it is supplied or fitted.
    """

    thickness_d: float
    rel_permittivity_eps_d: float
    volume_resistivity_rho: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        _positive("dielectric_thickness", self.thickness_d)
        _finite("dielectric_permittivity", self.rel_permittivity_eps_d)
        if self.rel_permittivity_eps_d < 1:
            raise ValidationError("dielectric_permittivity", f"must be >= 1, got {self.rel_permittivity_eps_d!r}")
        if self.volume_resistivity_rho is not None:
            _positive("volume_resistivity", self.volume_resistivity_rho)


@dataclass(frozen=True)
class InterfaceSpec:
    gap_g: float
    cof_mu: float
    gas_permittivity_eps_g: float = 1.0

    def __post_init__(self):
        _positive("gap", self.gap_g)
        _finite("gas_permittivity", self.gas_permittivity_eps_g)
        if self.gas_permittivity_eps_g < 1:
            raise ValidationError("gas_permittivity", f"must be >= 1, got {self.gas_permittivity_eps_g!r}")
        _finite("cof", self.cof_mu)
        if not 0 < self.cof_mu < 2:
            raise ValidationError("cof", f"must lie in (0, 2), got {self.cof_mu!r}")


@dataclass(frozen=True)
class BandSpec:
    thickness_h: float
    width_l: float
    yield_stress_sigma_max: float

    def __post_init__(self):
        _positive("band_thickness", self.thickness_h)
        _positive("band_width", self.width_l)
        _positive("yield_stress", self.yield_stress_sigma_max)


@dataclass(frozen=True)
class CapstanGeometry:
    shaft_radius_r: float
    wrap_angle_theta: float
    pretension_T_hold: float

    def __post_init__(self):
        _positive("shaft_radius", self.shaft_radius_r)
        _non_negative("wrap_angle", self.wrap_angle_theta)
        _non_negative("pretension", self.pretension_T_hold)


@dataclass(frozen=True)
class ClutchDesign:
    dielectric: DielectricSpec
    interface: InterfaceSpec
    band: BandSpec
    geometry: CapstanGeometry

    # shorthands used throughout the model
    @property
    def r(self) -> float:
        return self.geometry.shaft_radius_r

    @property
    def theta(self) -> float:
        return self.geometry.wrap_angle_theta

    @property
    def t_hold(self) -> float:
        return self.geometry.pretension_T_hold

    @property
    def mu(self) -> float:
        return self.interface.cof_mu

    @property
    def l(self) -> float:  # noqa: E743
        return self.band.width_l

    @property
    def h(self) -> float:
        return self.band.thickness_h

    @property
    def contact_area(self) -> float:
        """Apparent band/dielectric contact area l·r·θ."""
        return self.l * self.r * self.theta


@dataclass(frozen=True)
class OperatingPoint:
    voltage_V: float

    def __post_init__(self):
        _non_negative("voltage", self.voltage_V)


@dataclass(frozen=True)
class PressureBreakdown:
    coulomb_pressure: float
    jr_pressure: float
    beta_total: float
    alpha_per_radian: float


@dataclass(frozen=True)
class Advantage:
    exact: float
    approx: float
    ratio_term: float


@dataclass(frozen=True)
class BandStress:
    adhesive_stress: float
    exact_stress: float


@dataclass(frozen=True)
class Prediction:
    """Model output at one operating point.

    Per-area quantities (``specific_shear_stress``, the advantage factors)
    are None when the wrap angle is zero; ``specific_power`` is None when
    the dielectric resistivity is unknown.
    """

    t_load: float
    holding_torque: float
    band_stress: float
    band_stress_adhesive: float
    specific_shear_stress: Optional[float]
    specific_power: Optional[float]
    pressures: PressureBreakdown
    advantage_exact: Optional[float]
    advantage_approx: Optional[float]
    ratio_term: Optional[float]
    planar_tension: float
    planar_specific_shear_stress: Optional[float]
    warnings: tuple = field(default=())


# --------------------------------------------------------------------------
# Pressures
# --------------------------------------------------------------------------

def coulomb_pressure(op: OperatingPoint, d: DielectricSpec, i: InterfaceSpec) -> float:
    """Series-capacitor Coulomb pressure across dielectric bulk and air gap."""
    ratio = i.gas_permittivity_eps_g * d.rel_permittivity_eps_d / (
        d.thickness_d * i.gas_permittivity_eps_g + i.gap_g * d.rel_permittivity_eps_d
    )
    return 0.5 * EPS0 * op.voltage_V**2 * ratio**2


def jr_pressure(op: OperatingPoint, i: InterfaceSpec) -> float:
    """Johnsen-Rahbek pressure: the full voltage drops across the gap."""
    if not i.gap_g > 0:
        raise ValidationError("gap", f"must be > 0, got {i.gap_g!r}")
    return 0.5 * EPS0 * op.voltage_V**2 * (i.gas_permittivity_eps_g / i.gap_g) ** 2


def ea_pressure(op: OperatingPoint, design: ClutchDesign, include_jr: bool = True) -> PressureBreakdown:
    c = coulomb_pressure(op, design.dielectric, design.interface)
    j = jr_pressure(op, design.interface) if include_jr else 0.0
    beta = c + j
    return PressureBreakdown(c, j, beta, beta * design.l * design.r)


# --------------------------------------------------------------------------
# Tension
# --------------------------------------------------------------------------

def _check_capstan_args(t_hold, mu, theta):
    _non_negative("pretension", t_hold)
    _positive("cof", mu)
    _finite("wrap_angle", theta)
    if theta < 0:
        raise ValidationError("wrap_angle", f"must be >= 0 (the clutch holds in one direction only), got {theta!r}")


def capstan_tension(t_hold: float, mu: float, theta: float) -> float:
    _check_capstan_args(t_hold, mu, theta)
    return t_hold * math.exp(mu * theta)


def es_capstan_tension(t_hold: float, mu: float, theta: float, alpha: float) -> float:
    _check_capstan_args(t_hold, mu, theta)
    _non_negative("alpha", alpha)
    mt = mu * theta
    return t_hold * math.exp(mt) + alpha * math.expm1(mt)


def governing_tension(op: OperatingPoint, design: ClutchDesign, include_jr: bool = True) -> float:
    alpha = ea_pressure(op, design, include_jr).alpha_per_radian
    return es_capstan_tension(design.t_hold, design.mu, design.theta, alpha)


def planar_tension(op: OperatingPoint, design: ClutchDesign, include_jr: bool = True) -> float:
    """Holding force of a flat clutch with the same contact area."""
    beta = ea_pressure(op, design, include_jr).beta_total
    return design.mu * beta * design.l * design.r * design.theta


def advantage_approx(mu_theta: float) -> float:
    """(e^x - 1)/x, evaluated without cancellation for small x."""
    if mu_theta <= 0:
        raise ValidationError("wrap_angle", "advantage needs mu*theta > 0")
    return math.expm1(mu_theta) / mu_theta


def advantage(t_hold: float, design: ClutchDesign, beta: float) -> Advantage:
    theta = design.theta
    if theta <= 0:
        raise ValidationError("wrap_angle", "advantage is undefined at theta = 0 (limit is 1)")
    _positive("beta", beta)
    _non_negative("pretension", t_hold)
    mt = design.mu * theta
    ratio = t_hold / (design.l * design.r * beta)
    # ((ratio + 1) e^x - 1)/x regrouped as (ratio e^x + expm1 x)/x
    exact = (ratio * math.exp(mt) + math.expm1(mt)) / mt
    return Advantage(exact=exact, approx=advantage_approx(mt), ratio_term=ratio)


# --------------------------------------------------------------------------
# Stress, torque, per-area metrics
# --------------------------------------------------------------------------

def band_stress(op: OperatingPoint, design: ClutchDesign) -> BandStress:
    """Tensile stress in the band: from the adhesive term alone, (r/h)·β·(e^(μθ)−1), and from T_load/(l·h)."""
    beta = ea_pressure(op, design).beta_total
    adhesive = design.r / design.h * beta * math.expm1(design.mu * design.theta)
    exact = governing_tension(op, design) / (design.l * design.h)
    return BandStress(adhesive_stress=adhesive, exact_stress=exact)


def max_torque(band: BandSpec, r: float, sigma_max: float | None = None) -> float:
    """Torque at which the band reaches ``sigma_max`` (defaults to its yield stress)."""
    sigma = band.yield_stress_sigma_max if sigma_max is None else sigma_max
    _positive("shaft_radius", r)
    _non_negative("yield_stress", sigma)
    return band.width_l * band.thickness_h * r * sigma


def specific_shear_stress(t_load: float, design: ClutchDesign) -> float:
    if design.theta <= 0:
        raise ValidationError("wrap_angle", "specific shear stress needs theta > 0 (zero contact area)")
    return t_load / design.contact_area


def specific_power(op: OperatingPoint, d: DielectricSpec) -> float:
    """Ohmic leakage power per unit area, V²/(ρ·d)."""
    if d.volume_resistivity_rho is None:
        raise ValidationError(
            "volume_resistivity",
            "unknown; supply it in the design or estimate it with fit_resistivity",
        )
    return op.voltage_V**2 / (d.volume_resistivity_rho * d.thickness_d)


# --------------------------------------------------------------------------
# ODE oracle
# --------------------------------------------------------------------------

def ode_tension_oracle(op: OperatingPoint, design: ClutchDesign, n_steps: int = 100_000,
                       backend: str | None = None) -> float:
    """Integrate dT/dθ = μ(T + β·l·r) numerically with fixed-step RK4.

    Independent of the closed form; used to check it.
    """
    if n_steps < 1000:
        raise ValidationError("n_steps", f"must be >= 1000, got {n_steps!r}")
    alpha = ea_pressure(op, design).alpha_per_radian
    out = _kernels.rk4_tension([design.t_hold], [design.mu], [design.theta], [alpha], n_steps, backend)
    return float(out[0])


def ode_tension_oracle_batch(t_hold, mu, theta, alpha, n_steps: int = 100_000,
                             backend: str | None = None) -> np.ndarray:
    if n_steps < 1000:
        raise ValidationError("n_steps", f"must be >= 1000, got {n_steps!r}")
    return _kernels.rk4_tension(t_hold, mu, theta, alpha, n_steps, backend)


# --------------------------------------------------------------------------
# Bundled prediction
# --------------------------------------------------------------------------

def predict(op: OperatingPoint, design: ClutchDesign, include_jr: bool = True) -> Prediction:
    pressures = ea_pressure(op, design, include_jr)
    t_load = es_capstan_tension(design.t_hold, design.mu, design.theta, pressures.alpha_per_radian)
    mt = design.mu * design.theta
    adhesive = design.r / design.h * pressures.beta_total * math.expm1(mt)
    planar = design.mu * pressures.alpha_per_radian * design.theta
    warnings = []

    if design.theta > 0:
        sss = t_load / design.contact_area
        planar_sss = planar / design.contact_area
        adv_approx = advantage_approx(mt)
        if pressures.beta_total > 0:
            adv = advantage(design.t_hold, design, pressures.beta_total)
            adv_exact, ratio = adv.exact, adv.ratio_term
        else:
            adv_exact = ratio = None
    else:
        sss = planar_sss = adv_exact = adv_approx = ratio = None

    if design.dielectric.volume_resistivity_rho is not None:
        power = specific_power(op, design.dielectric)
    else:
        power = None

    exact_stress = t_load / (design.l * design.h)
    if exact_stress > design.band.yield_stress_sigma_max:
        warnings.append(
            f"band stress {exact_stress:.4g} Pa exceeds yield stress "
            f"{design.band.yield_stress_sigma_max:.4g} Pa"
        )

    return Prediction(
        t_load=t_load,
        holding_torque=t_load * design.r,
        band_stress=exact_stress,
        band_stress_adhesive=adhesive,
        specific_shear_stress=sss,
        specific_power=power,
        pressures=pressures,
        advantage_exact=adv_exact,
        advantage_approx=adv_approx,
        ratio_term=ratio,
        planar_tension=planar,
        planar_specific_shear_stress=planar_sss,
        warnings=tuple(warnings),
    )
