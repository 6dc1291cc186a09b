"""Physical constants, material presets and the macrospin of a sphere.

All frequencies inside the package are angular (rad/s). Divide by 2*pi for Hz.
"""
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsDomainError

MU0 = 4e-7 * np.pi  # T m / A
HBAR = 1.054571817e-34  # J s


@dataclass(frozen=True)
class Constants:
    mu0: float = MU0
    hbar: float = HBAR


@dataclass(frozen=True)
class MaterialParams:
    """Magnet and qubit material parameters.

    Attributes
    ----------
    gamma0 : float
        (rad Hz / T) gyromagnetic ratio of the magnet
    gammaq : float
        (rad Hz / T) gyromagnetic ratio of the spin qubit
    Ms : float
        (A/m) saturation magnetization
    ka : float
        (J/m^3) anisotropy energy density
    DeltaNV : float
        (rad/s) NV zero-field splitting
    """

    gamma0: float
    gammaq: float
    Ms: float
    ka: float
    DeltaNV: float

    def __post_init__(self):
        for name in ("gamma0", "gammaq", "Ms", "ka", "DeltaNV"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise PhysicsDomainError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class FieldBias:
    """Bias field of magnitude B0 (T), applied along -z."""

    B0: float

    def __post_init__(self):
        if not (np.isfinite(self.B0) and self.B0 >= 0):
            raise PhysicsDomainError(f"B0 must be >= 0, got {self.B0!r}")

    def larmor(self, mat):
        return mat.gamma0 * self.B0


def yig_preset():
    """YIG sphere with an NV-center qubit."""
    return MaterialParams(
        gamma0=1.76199e11,
        gammaq=1.76149e11,
        Ms=196e3,
        ka=2480.0,
        DeltaNV=2 * np.pi * 2.87e9,
    )


PRESETS = {"yig": yig_preset}


def material_from_name(name):
    try:
        return PRESETS[name.lower()]()
    except KeyError:
        raise KeyError(f"unknown material preset {name!r}; known: {sorted(PRESETS)}") from None


def magnet_moment(R, mat):
    """Magnetic moment (A m^2) and dimensionless total spin of a sphere.

    Parameters
    ----------
    R : float
        (m) sphere radius
    mat : MaterialParams

    Returns
    -------
    mu : float
        Ms * 4 pi R^3 / 3
    F : float
        mu / (hbar gamma0)
    """
    if not R > 0:
        raise PhysicsDomainError(f"magnet radius must be positive, got {R!r}")
    mu = mat.Ms * (4.0 * np.pi / 3.0) * R**3
    return mu, mu / (HBAR * mat.gamma0)


def total_spin(R, mat):
    return magnet_moment(R, mat)[1]


def to_hz(omega):
    return np.asarray(omega) / (2 * np.pi)
