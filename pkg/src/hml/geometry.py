"""Shapes and placements: flux factors, loop inductance, dipole fields.

Coordinates for the circular coil follow a fixed frame: the loop lies in
the yz-plane, centred at (0, 0, l + d), and the magnet sits at (h, 0, 0).
The bias field points along -z, i.e. inside the loop plane.
"""
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, PhysicsDomainError, ValidityWarning
from .quadrature import adaptive_gauss_legendre
from .units import HBAR, MU0


@dataclass(frozen=True)
class LoopSpec:
    """Superconducting ring of radius ``l`` made of wire of thickness ``tau``.

    ``Cap`` is the total capacitance (F); ``per_unit_L`` and ``per_unit_C``
    are the transmission-line inductance and capacitance per length.
    """

    l: float
    tau: float
    Cap: Optional[float] = None
    per_unit_L: Optional[float] = None
    per_unit_C: Optional[float] = None

    def __post_init__(self):
        if not (self.l > 0 and self.tau > 0):
            raise PhysicsDomainError(f"loop radius and wire thickness must be positive: l={self.l}, tau={self.tau}")
        if self.tau >= self.l:
            raise PhysicsDomainError(f"wire thickness tau={self.tau} must be smaller than loop radius l={self.l}")
        if self.tau >= self.l / 10:
            warnings.warn(f"tau/l = {self.tau / self.l:.3g} is not small; thin-wire inductance is inaccurate",
                          ValidityWarning, stacklevel=3)
        for name in ("Cap", "per_unit_L", "per_unit_C"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise PhysicsDomainError(f"{name} must be positive when set, got {value!r}")


@dataclass(frozen=True)
class Placement:
    """Magnet placement: in-plane gap ``d`` to the nearest wire point, height ``h`` above the loop plane."""

    d: float
    h: float = 0.0

    def __post_init__(self):
        if not self.d > 0:
            raise PhysicsDomainError(f"d must be positive, got {self.d!r}")
        if not self.h >= 0:
            raise PhysicsDomainError(f"h must be >= 0, got {self.h!r}")


@dataclass(frozen=True)
class FluxFactors:
    Ix: float
    Iy: float
    Iz: float
    Phi_e: float
    Phi_bias: float

    @property
    def I(self):
        """Complex in-plane factor I_x + i I_y entering the tunneling rate."""
        return complex(self.Ix, self.Iy)


def loop_inductance(loop, model="full"):
    """Self-inductance (H) of a circular ring of round wire.

    ``model="full"`` keeps the -7/4 correction; ``"leading_log"`` drops it.
    """
    log = np.log(8 * loop.l / loop.tau)
    if model == "full":
        return MU0 * loop.l * (log - 1.75)
    if model == "leading_log":
        return MU0 * loop.l * log
    raise ValueError(f"unknown inductance model {model!r}")


def lc_frequency(loop, model="full"):
    """Single-mode LC frequency 1/sqrt(L C) (rad/s)."""
    if loop.Cap is None:
        raise ConfigurationError("loop capacitance is not set", path="loop.Cap")
    return 1.0 / np.sqrt(loop_inductance(loop, model) * loop.Cap)


def resonator_mode_frequencies(loop, n_max):
    """Ring-resonator mode frequencies n / (l sqrt(L_l C_l)) for n = 1..n_max (rad/s)."""
    if loop.per_unit_L is None:
        raise ConfigurationError("per-unit-length inductance is not set", path="loop.per_unit_L")
    if loop.per_unit_C is None:
        raise ConfigurationError("per-unit-length capacitance is not set", path="loop.per_unit_C")
    if int(n_max) < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max!r}")
    n = np.arange(1, int(n_max) + 1)
    return n / (loop.l * np.sqrt(loop.per_unit_L * loop.per_unit_C))


def flux_scale(d, mat):
    """Flux per unit spin component, hbar gamma0 mu0 / (4 pi d) (Wb)."""
    return HBAR * mat.gamma0 * MU0 / (4 * np.pi * d)


def _circular_integrands(x, y):
    # lambda = x sin(u) removes the 1/sqrt(x^2 - lambda^2) endpoint singularities
    def denom(u):
        lam = x * np.sin(u)
        return (y * y + x * x + (x + 1) ** 2 + 2 * lam * (x + 1)) ** 1.5

    def g(u):
        return (x * x + (x + 1) * x * np.sin(u)) / denom(u)

    def f(u):
        return y * x * np.sin(u) / denom(u)

    return f, g


def circular_flux_integrals(l_over_d, h_over_d, tol=1e-9, order=16):
    """Dimensionless flux factors (I_x, I_z) of the circular coil.

    The contour is traversed with increasing polar angle, which makes
    I_x positive for an in-plane magnet. The integrals over lambda cover
    half the ring, hence the factor -2 relative to a single pass.

    Returns
    -------
    (Ix, Iz), (err_x, err_z)
    """
    x, y = float(l_over_d), float(h_over_d)
    if not x > 0:
        raise PhysicsDomainError(f"l/d must be positive, got {x!r}")
    f, g = _circular_integrands(x, y)
    # the integrand peaks at u = -pi/2 with width ~ sqrt(1 + y^2) / x
    width = np.sqrt(1 + y * y) / x
    bps = [-np.pi / 2 + c * width for c in (0.5, 2, 8, 32, 128)]
    a, b = -np.pi / 2, np.pi / 2
    ix, ex = adaptive_gauss_legendre(g, a, b, tol=tol / 2, order=order, breakpoints=bps)
    if y == 0:
        iz, ez = 0.0, 0.0
    else:
        iz, ez = adaptive_gauss_legendre(f, a, b, tol=tol / 2, order=order, breakpoints=bps)
    return (-2 * ix, -2 * iz), (2 * ex, 2 * ez)


def flux_factors_circular(loop, place, mat, F=None, tol=1e-9, order=16):
    """Flux factors of a magnet next to a circular loop.

    ``Phi_bias`` is the flux of the equilibrium moment -F z-hat; it needs
    ``F`` whenever ``h > 0`` and vanishes identically for ``h = 0``.
    """
    (ix, iz), _ = circular_flux_integrals(loop.l / place.d, place.h / place.d, tol=tol, order=order)
    phi_e = flux_scale(place.d, mat)
    if place.h == 0:
        phi_bias = 0.0
    elif F is None:
        raise ConfigurationError("total spin F is required for the bias flux at h > 0", path="F")
    else:
        phi_bias = phi_e * iz * (-F)
    return FluxFactors(Ix=ix, Iy=0.0, Iz=iz, Phi_e=phi_e, Phi_bias=phi_bias)


def dipole_field(mu_vec, r_src, r_obs):
    """Field (T) of a point dipole ``mu_vec`` at ``r_src`` evaluated at ``r_obs``.

    ``r_obs`` may carry leading batch dimensions, shape (..., 3).
    """
    mu_vec = np.asarray(mu_vec, dtype=float)
    dr = np.asarray(r_obs, dtype=float) - np.asarray(r_src, dtype=float)
    dist = np.linalg.norm(dr, axis=-1, keepdims=True)
    if np.any(dist == 0):
        raise PhysicsDomainError("field requested at the dipole position")
    mdotr = np.sum(dr * mu_vec, axis=-1, keepdims=True)
    return MU0 / (4 * np.pi) * (3 * dr * mdotr / dist**5 - mu_vec / dist**3)


def critical_distance(R, mat, Bc, tau):
    """Smallest wire-centre distance keeping the wire field below ``Bc``."""
    if not Bc > 0:
        raise PhysicsDomainError(f"critical field must be positive, got {Bc!r}")
    return tau / 2 + (2 * MU0 * mat.Ms / (3 * Bc)) ** (1 / 3) * R


def wire_field(R, mat, d, tau):
    """Field (T) at the closest wire point for a magnet at distance ``d`` from the wire centre."""
    gap = d - tau / 2
    if not gap > 0:
        raise PhysicsDomainError(f"magnet overlaps the wire: d - tau/2 = {gap!r}")
    return 2 * MU0 * mat.Ms / 3 * (R / gap) ** 3


def bone_tunneling(d, tau, F, mat, R=None):
    """Loop-mediated tunneling rate (rad/s) through a bone-shaped coil.

    ``d`` is the end-ring radius; the inductance is that of a full circular
    ring of radius ``d``. Passing the magnet radius ``R`` enables the R < d
    validity check.
    """
    if not d > tau:
        raise PhysicsDomainError(f"end-ring radius d={d} must exceed wire thickness tau={tau}")
    if R is not None and R >= d:
        warnings.warn(f"bone coupler formula assumes R < d (R={R}, d={d})", ValidityWarning, stacklevel=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        L = loop_inductance(LoopSpec(l=d, tau=tau), "full")
    return mat.gamma0**2 * MU0**2 * HBAR * F / (8 * d**2 * L)
