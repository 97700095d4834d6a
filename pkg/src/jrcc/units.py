"""Unit tokens accepted at the I/O boundary and their exact SI scalings.

Decimal input is parsed with :class:`fractions.Fraction` and multiplied by a
rational factor, so ``12.7 mm`` becomes the float nearest to 0.0127 rather
than ``12.7 * 0.001``. Angles in wraps or degrees carry a factor of π and
are the one inexact conversion.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import ValidationError

_MICRO = ("um", "µm", "μm")

# kind -> {token: (rational factor, times pi)}
UNITS: dict[str, dict[str, tuple[Fraction, bool]]] = {
    "length": {
        "m": (Fraction(1), False),
        "cm": (Fraction(1, 100), False),
        "mm": (Fraction(1, 1000), False),
        **{tok: (Fraction(1, 10**6), False) for tok in _MICRO},
        "nm": (Fraction(1, 10**9), False),
    },
    "angle": {
        "rad": (Fraction(1), False),
        "wraps": (Fraction(2), True),
        "wrap": (Fraction(2), True),
        "deg": (Fraction(1, 180), True),
    },
    "force": {
        "N": (Fraction(1), False),
        "mN": (Fraction(1, 1000), False),
        "kN": (Fraction(1000), False),
    },
    "torque": {
        "N*m": (Fraction(1), False),
        "N.m": (Fraction(1), False),
        "N·m": (Fraction(1), False),
        "Nm": (Fraction(1), False),
        "mN*m": (Fraction(1, 1000), False),
    },
    "pressure": {
        "Pa": (Fraction(1), False),
        "kPa": (Fraction(10**3), False),
        "MPa": (Fraction(10**6), False),
        "GPa": (Fraction(10**9), False),
        "N/m2": (Fraction(1), False),
        "N/cm2": (Fraction(10**4), False),
        "N/cm^2": (Fraction(10**4), False),
    },
    "voltage": {
        "V": (Fraction(1), False),
        "kV": (Fraction(1000), False),
        "mV": (Fraction(1, 1000), False),
    },
    "resistivity": {
        "ohm*m": (Fraction(1), False),
        "ohm.m": (Fraction(1), False),
        "Ω·m": (Fraction(1), False),
        "ohm*cm": (Fraction(1, 100), False),
        "ohm.cm": (Fraction(1, 100), False),
        "Ω·cm": (Fraction(1, 100), False),
    },
    "power_areal": {
        "W/m2": (Fraction(1), False),
        "mW/cm2": (Fraction(10), False),
    },
    "dimensionless": {
        "": (Fraction(1), False),
        "1": (Fraction(1), False),
    },
}

SI_TOKEN = {
    "length": "m",
    "angle": "rad",
    "force": "N",
    "torque": "N*m",
    "pressure": "Pa",
    "voltage": "V",
    "resistivity": "ohm*m",
    "power_areal": "W/m2",
    "dimensionless": "",
}

_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*?)\s*$")


def accepted_tokens(kind: str) -> list[str]:
    return [tok for tok in UNITS[kind] if tok]


def parse_number(text: str, name: str) -> Fraction:
    m = _NUMBER.match(text)
    if not m or m.group(2):
        raise ValidationError(name, f"not a number: {text!r}")
    return Fraction(m.group(1))


def split_quantity(text: str, name: str) -> tuple[Fraction, str]:
    """Split ``"12.7 mm"`` into (Fraction('12.7'), 'mm')."""
    m = _NUMBER.match(text)
    if not m:
        raise ValidationError(name, f"expected '<number> <unit>', got {text!r}")
    return Fraction(m.group(1)), m.group(2)


def scale(value: Fraction, unit: str, kind: str, name: str) -> float:
    """Convert an exact decimal value in ``unit`` to an SI float."""
    table = UNITS[kind]
    if unit not in table:
        if kind != "dimensionless" and unit == "":
            raise ValidationError(name, f"missing unit; accepted: {', '.join(accepted_tokens(kind))}")
        raise ValidationError(
            name, f"unknown unit {unit!r} for a {kind} quantity; accepted: {', '.join(accepted_tokens(kind)) or '(none)'}"
        )
    factor, times_pi = table[unit]
    if times_pi:
        return float(value * factor) * math.pi
    return float(value * factor)


def to_si(text: str, kind: str, name: str) -> float:
    value, unit = split_quantity(text, name)
    return scale(value, unit, kind, name)


def column_suffix(unit: str) -> str:
    """Unit token rendered as a column-name suffix (``N/cm2`` -> ``N_per_cm2``)."""
    if unit in _MICRO:
        return "um"
    out = unit.replace("/", "_per_").replace("*", "_").replace("·", "_").replace(".", "_").replace("^", "")
    return out.replace("Ω", "ohm")
