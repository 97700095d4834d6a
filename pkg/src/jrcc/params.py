"""Named design parameters shared by config files, ``--set`` overrides and sweep axes."""

from __future__ import annotations

from dataclasses import replace
from typing import NamedTuple

from .errors import ValidationError
from .model import ClutchDesign, OperatingPoint


class Param(NamedTuple):
    section: str  # "op" or a ClutchDesign field
    attr: str
    kind: str
    required: bool = True


PARAMS: dict[str, Param] = {
    "shaft_radius": Param("geometry", "shaft_radius_r", "length"),
    "wrap_angle": Param("geometry", "wrap_angle_theta", "angle"),
    "pretension": Param("geometry", "pretension_T_hold", "force"),
    "band_thickness": Param("band", "thickness_h", "length"),
    "band_width": Param("band", "width_l", "length"),
    "yield_stress": Param("band", "yield_stress_sigma_max", "pressure"),
    "dielectric_thickness": Param("dielectric", "thickness_d", "length"),
    "dielectric_permittivity": Param("dielectric", "rel_permittivity_eps_d", "dimensionless"),
    "volume_resistivity": Param("dielectric", "volume_resistivity_rho", "resistivity", required=False),
    "gap": Param("interface", "gap_g", "length"),
    "gas_permittivity": Param("interface", "gas_permittivity_eps_g", "dimensionless", required=False),
    "cof": Param("interface", "cof_mu", "dimensionless"),
    "voltage": Param("op", "voltage_V", "voltage"),
}

ALIASES = {"gap_g": "gap", "theta": "wrap_angle", "mu": "cof", "t_hold": "pretension"}


def canonical(key: str) -> str:
    key = ALIASES.get(key, key)
    if key not in PARAMS:
        raise ValidationError(key, f"unknown parameter; known: {', '.join(PARAMS)}")
    return key


def get_value(design: ClutchDesign, op: OperatingPoint, key: str) -> float:
    p = PARAMS[canonical(key)]
    if p.section == "op":
        return getattr(op, p.attr)
    return getattr(getattr(design, p.section), p.attr)


def apply(design: ClutchDesign, op: OperatingPoint, overrides: dict) -> tuple[ClutchDesign, OperatingPoint]:
    """Return copies with SI ``overrides`` applied; invariants are re-validated."""
    sections: dict[str, dict] = {}
    for key, value in overrides.items():
        p = PARAMS[canonical(key)]
        sections.setdefault(p.section, {})[p.attr] = value
    if "op" in sections:
        op = replace(op, **sections.pop("op"))
    parts = {name: replace(getattr(design, name), **fields) for name, fields in sections.items()}
    return replace(design, **parts), op
