"""Coefficients of the quadratic magnon Hamiltonian and the qubit-magnon couplings.

Rates are angular frequencies in rad/s. Counter-rotating coefficients
(``Lambda``) and linear terms (``eta``) are returned for diagnostics only;
the dynamics works in the rotating-wave approximation.
"""
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, PhysicsDomainError, ValidityWarning
from .geometry import FluxFactors, flux_factors_circular, flux_scale, loop_inductance
from .units import HBAR, MU0, magnet_moment


@dataclass(frozen=True)
class SitePair:
    r_i: np.ndarray
    r_j: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r_i", np.asarray(self.r_i, dtype=float))
        object.__setattr__(self, "r_j", np.asarray(self.r_j, dtype=float))
        if not self.r_ij > 0:
            raise PhysicsDomainError("coincident sites")

    @property
    def separation(self):
        return self.r_i - self.r_j

    @property
    def r_ij(self):
        return float(np.linalg.norm(self.separation))

    @property
    def theta_ij(self):
        return float(np.arccos(np.clip(self.separation[2] / self.r_ij, -1.0, 1.0)))

    @property
    def phi_ij(self):
        dx, dy, _ = self.separation
        return float(np.arctan2(dy, dx))


@dataclass
class QuadraticModel:
    """Magnon network coefficients.

    ``J`` and ``Jd`` hold the off-diagonal hopping amplitudes; the loop
    self-terms J_jj are already folded into ``omega``. ``gauge`` holds the
    per-site phases that make the loop-mediated hopping real.
    """

    omega: np.ndarray
    J: np.ndarray
    Jd: np.ndarray
    Lambda: np.ndarray
    eta: np.ndarray
    chi: Optional[np.ndarray] = None
    gauge: Optional[np.ndarray] = None

    def hopping(self):
        return self.J + self.Jd

    def hamiltonian(self):
        """Single-particle matrix: omega on the diagonal, J + Jd off it."""
        return np.diag(self.omega).astype(complex) + self.hopping()

    def gauge_fixed(self):
        """Hopping matrix after the site phase redefinition f_j -> exp(i gauge_j) f_j."""
        if self.gauge is None:
            return self.hopping()
        u = np.exp(1j * self.gauge)
        return u[:, None] * self.hopping() * u.conj()[None, :]


def loop_tunneling(flux_i, flux_j, L, F):
    """Loop-mediated hopping J_ij (rad/s, complex).

    Uses the stored flux scales Phi_e = hbar gamma0 mu0 / (4 pi d) of each
    site, so distinct distances d_i, d_j are handled.
    """
    if not (L > 0 and F > 0):
        raise PhysicsDomainError("inductance and total spin must be positive")
    I_ij = np.conj(flux_i.I) * flux_j.I
    return flux_i.Phi_e * flux_j.Phi_e * I_ij * F / (2 * HBAR * L)


def dipolar_tunneling(pair, F, mat):
    """Free-space dipole-dipole hopping J^d_ij (rad/s)."""
    s2 = np.sin(pair.theta_ij) ** 2
    return -HBAR * mat.gamma0**2 * MU0 * F * (3 * s2 - 2) / (8 * np.pi * pair.r_ij**3)


def dipolar_shift(pair, F, mat):
    """Static-field shift of site j's Larmor frequency from neighbour i."""
    c2 = np.cos(pair.theta_ij) ** 2
    return HBAR * mat.gamma0**2 * MU0 * (3 * c2 - 1) * F / (4 * np.pi * pair.r_ij**3)


def site_frequency(mat, B0, F=None, J_self=0.0, neighbours=()):
    """Kittel-mode frequency of one magnet (rad/s).

    Parameters
    ----------
    mat : MaterialParams
    B0 : float
        (T) bias field
    F : float, optional
        total spin; needed only when ``neighbours`` is non-empty
    J_self : float
        loop self-term J_jj
    neighbours : iterable of SitePair
        pairs (r_i, r_j) with j the site of interest
    """
    omega = mat.gamma0 * B0 + 2 * mat.gamma0 * mat.ka / mat.Ms + np.real(J_self)
    for pair in neighbours:
        omega += dipolar_shift(pair, F, mat)
    return float(omega)


def circuit_coupling(flux, L, F, Cap):
    """Magnon-LC couplings chi_j (rad/s); needs the loop capacitance."""
    if Cap is None:
        raise ConfigurationError("loop capacitance is required for the circuit coupling", path="loop.Cap")
    omega_c = 1 / np.sqrt(L * Cap)
    phi_c = np.sqrt(HBAR / (2 * Cap * omega_c))
    return np.array([f.Phi_e * phi_c * f.I * np.sqrt(2 * F) / (2 * HBAR * L) for f in flux])


def counter_rotating_and_linear(positions, flux, L, F, mat, Cap=None, with_chi=False):
    """Counter-rotating matrix Lambda_ij, circuit couplings chi_j and linear terms eta_j.

    ``chi`` is ``None`` unless ``with_chi`` is set, in which case ``Cap``
    must be given.
    """
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    dip = HBAR * mat.gamma0**2 * MU0 * F
    I = np.array([f.I for f in flux])
    phi_e = np.array([f.Phi_e for f in flux])
    phi_bias = sum(f.Phi_bias for f in flux)
    Lam = np.outer(phi_e * I, phi_e * I) * F / (2 * HBAR * L)
    eta = phi_e * phi_bias * np.sqrt(2 * F) * I / (2 * HBAR * L)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pair = SitePair(positions[i], positions[j])
            phase = np.exp(2j * pair.phi_ij)
            dx, dy, dz = pair.separation
            # direction cosines directly, so sin(theta) is exactly 0 on the z axis
            st, ct = np.hypot(dx, dy) / pair.r_ij, dz / pair.r_ij
            Lam[i, j] += -3 * dip * st**2 * phase / (16 * np.pi * pair.r_ij**3)
            eta[j] += 3 * dip * np.sqrt(2 * F) * phase * ct * st / (8 * np.pi * pair.r_ij**3)
    chi = circuit_coupling(flux, L, F, Cap) if with_chi else None
    return Lam, chi, eta


def quadratic_model(positions, flux, L, F, mat, B0, Cap=None):
    """Assemble all coefficients for magnets sharing one loop.

    ``flux[j]`` are the flux factors of magnet j with respect to the loop.
    """
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    J = np.zeros((n, n), dtype=complex)
    Jd = np.zeros((n, n))
    omega = np.zeros(n)
    for j in range(n):
        neighbours = [SitePair(positions[i], positions[j]) for i in range(n) if i != j]
        omega[j] = site_frequency(mat, B0, F, loop_tunneling(flux[j], flux[j], L, F), neighbours)
        for i in range(n):
            if i != j:
                J[i, j] = loop_tunneling(flux[i], flux[j], L, F)
                Jd[i, j] = dipolar_tunneling(SitePair(positions[i], positions[j]), F, mat)
    Lam, chi, eta = counter_rotating_and_linear(positions, flux, L, F, mat, Cap, with_chi=Cap is not None)
    gauge = np.array([np.angle(f.I) if f.I != 0 else 0.0 for f in flux])
    return QuadraticModel(omega=omega, J=J, Jd=Jd, Lambda=Lam, eta=eta, chi=chi, gauge=gauge)


@dataclass(frozen=True)
class PairRates:
    """Two magnets on opposite sides of one ring (the elementary cell)."""

    model: QuadraticModel
    flux: FluxFactors
    L: float
    F: float
    J12: float
    Jd12: float
    ratio: float
    ratio_paper_formula: float
    positions: np.ndarray
    J12_linear_I: float = 0.0
    ratio_linear_I: float = 0.0


def single_loop_pair(loop, place, R, mat, B0, inductance_model="full", flux=None):
    """Rates of the two-magnet cell: magnets at (h, 0, 0) and (h, 0, 2(l + d)).

    The second magnet is the mirror image of the first through the loop
    centre plane, so its I_x equals the first one's and I_z flips sign.
    ``ratio_paper_formula`` is the large-loop estimate (l/d)^2 2 I^2 / (pi ln(8l/tau)).
    ``flux`` = (Ix, Iy, Iz) replaces the circular-coil integrals.
    ``J12_linear_I`` and ``ratio_linear_I`` take the geometric factor
    I_12 = I instead of I^2, the other reading of the two-magnet rate.
    """
    _, F = magnet_moment(R, mat)
    L = loop_inductance(loop, inductance_model)
    if flux is None:
        f1 = flux_factors_circular(loop, place, mat, F=F)
    else:
        ix, iy, iz = (float(v) for v in flux)
        phi_e = flux_scale(place.d, mat)
        f1 = FluxFactors(Ix=ix, Iy=iy, Iz=iz, Phi_e=phi_e, Phi_bias=-phi_e * iz * F)
    f2 = FluxFactors(Ix=f1.Ix, Iy=-f1.Iy, Iz=-f1.Iz, Phi_e=f1.Phi_e, Phi_bias=-f1.Phi_bias)
    sep = 2 * (loop.l + place.d)
    positions = np.array([[place.h, 0.0, 0.0], [place.h, 0.0, sep]])
    model = quadratic_model(positions, [f1, f2], L, F, mat, B0, Cap=loop.Cap)
    J12 = float(np.real(model.J[0, 1]))
    Jd12 = float(model.Jd[0, 1])
    if Jd12 == 0:
        raise PhysicsDomainError("dipolar tunneling vanishes; the rate ratio is undefined")
    x = loop.l / place.d
    paper = x**2 * 2 * f1.Ix**2 / (np.pi * np.log(8 * loop.l / loop.tau))
    J_lin = J12 / f1.Ix if f1.Ix != 0 else 0.0
    return PairRates(model=model, flux=f1, L=L, F=F, J12=J12, Jd12=Jd12,
                     ratio=J12 / Jd12, ratio_paper_formula=paper, positions=positions,
                     J12_linear_I=J_lin, ratio_linear_I=J_lin / Jd12)


@dataclass(frozen=True)
class QubitCoupling:
    """Couplings of an NV qubit at (r_q, theta, varphi) around a magnet.

    ``*_theta`` fields are the bare couplings, the others refer to the
    dressed qubit basis. ``xi`` is complex; ``g`` and ``W`` are real.
    """

    omega_sigma_bare: float
    xi_theta: float
    g_theta: float
    W_theta: float
    Theta: float
    omega_sigma: float
    xi: complex
    g: float
    W: float
    omega_q: float
    F: float
    r_q: float
    g_maintext: float
    omega_sigma_maintext: float


def mixing_angle(xi_theta, omega_sigma_bare, F):
    """Dressing angle Theta in [0, pi]; zero when xi(theta) vanishes."""
    t = np.arctan(np.sqrt(F) * abs(xi_theta) / abs(omega_sigma_bare))
    ratio = xi_theta / omega_sigma_bare
    if ratio < 0:
        return float(np.pi - t)
    return float(t)


def qubit_coupling(theta, varphi, r_q, R, mat, B0):
    """Dipolar NV-magnet couplings and the dressed qubit frequency (rad/s)."""
    if not r_q > R:
        raise PhysicsDomainError(f"qubit at r_q={r_q} lies inside the magnet of radius {R}")
    _, F = magnet_moment(R, mat)
    scale = HBAR * mat.gamma0 * mat.gammaq * MU0 / (np.pi * r_q**3)
    st, ct = np.sin(theta), np.cos(theta)
    omega_q = mat.DeltaNV - mat.gammaq * B0
    w_bare = omega_q - scale / 4 * F * (3 * ct**2 - 1)
    xi_t = 3 * scale / 4 * np.sqrt(2 * F) * st * ct
    W_t = scale / 8 * np.sqrt(F) * (3 * st**2 - 2)
    g_t = 3 * scale / 8 * np.sqrt(F) * st**2
    Th = mixing_angle(xi_t, w_bare, F)
    w_dressed = np.sqrt(w_bare**2 + F * xi_t**2)
    xi = xi_t * np.exp(1j * varphi) * np.cos(Th) + (W_t * np.exp(-1j * varphi) + g_t * np.exp(2j * varphi)) * np.sin(Th)
    g = xi_t * np.sin(Th) / 4 + g_t * np.cos(Th / 2) ** 2 - W_t * np.sin(Th / 2) ** 2
    W = xi_t * np.sin(Th) / 4 + W_t * np.cos(Th / 2) - g_t * np.sin(Th / 2)
    return QubitCoupling(
        omega_sigma_bare=float(w_bare), xi_theta=float(xi_t), g_theta=float(g_t), W_theta=float(W_t),
        Theta=Th, omega_sigma=float(w_dressed), xi=complex(xi), g=float(g), W=float(W),
        omega_q=float(omega_q), F=F, r_q=r_q,
        g_maintext=3 * scale / 8 * np.sqrt(2 * F),
        omega_sigma_maintext=float(omega_q + scale / 4 * F),
    )


@dataclass(frozen=True)
class JCSite:
    omega_sigma: float
    g: float
    omega_magnon: float
    g_maintext: float
    rwa_valid: bool


def jaynes_cummings_site(qc, omega_j, rwa_threshold=0.1):
    """Package one site of the Jaynes-Cummings-Hubbard model.

    Uses the dressed coupling for the dynamics and reports the main-text
    coupling sqrt(2) g(pi/2) alongside. Warns when the rotating-wave
    conditions g, |omega_j - omega_sigma| << omega_j fail.
    """
    valid = abs(qc.g) < rwa_threshold * omega_j and abs(omega_j - qc.omega_sigma) < rwa_threshold * omega_j
    if not valid:
        warnings.warn("rotating-wave approximation is not justified at this site", ValidityWarning, stacklevel=2)
    return JCSite(omega_sigma=qc.omega_sigma, g=qc.g, omega_magnon=omega_j,
                  g_maintext=qc.g_maintext, rwa_valid=valid)


def frequency_map(B0_values, R, r_q, mat, J=0.0):
    """Magnon normal modes omega_0 +/- J and qubit frequency versus bias field.

    The qubit sits on the x-axis of its magnet (theta = pi/2).

    Returns
    -------
    dict of arrays: B0, omega0, omega_plus, omega_minus, omega_sigma
    """
    B0_values = np.asarray(B0_values, dtype=float)
    omega0 = np.array([site_frequency(mat, b) for b in B0_values])
    omega_sigma = np.array([qubit_coupling(np.pi / 2, 0.0, r_q, R, mat, b).omega_sigma for b in B0_values])
    return {
        "B0": B0_values,
        "omega0": omega0,
        "omega_plus": omega0 + J,
        "omega_minus": omega0 - J,
        "omega_sigma": omega_sigma,
    }


def crossing_fields(freq_map):
    """Bias fields where omega_sigma crosses omega_plus and omega_minus (linear interpolation)."""
    out = {}
    B = freq_map["B0"]
    for key in ("omega_plus", "omega_minus"):
        diff = freq_map[key] - freq_map["omega_sigma"]
        idx = np.nonzero(np.sign(diff[:-1]) * np.sign(diff[1:]) < 0)[0]
        out[key] = [float(B[i] - diff[i] * (B[i + 1] - B[i]) / (diff[i + 1] - diff[i])) for i in idx]
    return out
