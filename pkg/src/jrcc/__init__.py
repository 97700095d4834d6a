"""Modeling, calibration and design sweeps for Johnsen-Rahbek electrostatic capstan clutches."""

__version__ = "0.1.0"

from .errors import FitError, ValidationError
from .model import (
    BandSpec,
    CapstanGeometry,
    ClutchDesign,
    DielectricSpec,
    InterfaceSpec,
    OperatingPoint,
    Prediction,
    governing_tension,
    predict,
)

__all__ = [
    "__version__",
    "BandSpec",
    "CapstanGeometry",
    "ClutchDesign",
    "DielectricSpec",
    "FitError",
    "InterfaceSpec",
    "OperatingPoint",
    "Prediction",
    "ValidationError",
    "governing_tension",
    "predict",
]
