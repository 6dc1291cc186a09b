"""Hybrid magnetic lattices: superconducting loops coupling magnetic microspheres."""
from .errors import ConfigurationError, ConvergenceError, HMLError, PhysicsDomainError, ValidityWarning
from .units import FieldBias, MaterialParams, magnet_moment, yig_preset

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "FieldBias",
    "HMLError",
    "MaterialParams",
    "PhysicsDomainError",
    "ValidityWarning",
    "magnet_moment",
    "yig_preset",
]
