"""Magnon lattices built from loop-coupled magnets: chain, ring and checkerboard.

Every lattice is described by a bond list. The same list generates the
Bloch matrices and the real-space Hamiltonian used as an oracle, so the
two constructions can only differ by a bug in the Fourier transform.

Checkerboard conventions
------------------------
Bravais vectors v1 = (2a, 0) and v2 = (a, a). The D sublattice sits at the
cell origin, the A sublattice at v1 / 2. Offsets below are written in the
(v1, v2) basis.
"""
import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, PhysicsDomainError

KINDS = ("chain", "ring", "checkerboard")
BOUNDARIES = ("periodic", "open")
MAX_ORACLE_SITES = 512

# (sublattice_from, sublattice_to, cell shift in the (v1, v2) basis), one entry per unordered bond
_CHAIN_BONDS = ((0, 0, (1,)),)
_CHECKERBOARD_BONDS = (
    (0, 0, (1, 0)),     # D-D along v1
    (1, 1, (-1, 1)),    # A-A along the anti-diagonal
    (0, 1, (0, 0)),     # D-A, cartesian offset (+a, 0)
    (0, 1, (-1, 0)),    # (-a, 0)
    (0, 1, (0, -1)),    # (0, -a)
    (0, 1, (-1, 1)),    # (0, +a)
)
_CHECKERBOARD_BASIS = ((0.0, 0.0), (0.5, 0.0))


@dataclass(frozen=True)
class LatticeSpec:
    """Magnon lattice of identical sites.

    Attributes
    ----------
    kind : {"chain", "ring", "checkerboard"}
    omega0 : float
        (rad/s) site frequency
    Jrate : float
        (rad/s) real nearest-neighbour hopping
    a : float
        (m) lattice constant
    N : int
        sites per dimension (cells per dimension for the checkerboard)
    boundary : {"periodic", "open"}
    """

    kind: str
    omega0: float
    Jrate: float
    a: float = 1.0
    N: int = 8
    boundary: str = "periodic"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown lattice kind {self.kind!r}; expected one of {KINDS}", path="lattice.kind")
        if self.boundary not in BOUNDARIES:
            raise ConfigurationError(f"unknown boundary {self.boundary!r}", path="lattice.boundary")
        if np.iscomplexobj(self.Jrate) and np.imag(self.Jrate) != 0:
            raise PhysicsDomainError("Jrate must be real; absorb its phase into the site operators first")
        if not np.isfinite(self.omega0) or not np.isfinite(np.real(self.Jrate)):
            raise PhysicsDomainError("omega0 and Jrate must be finite")
        if int(self.N) != self.N or self.N < 2:
            raise PhysicsDomainError(f"N must be an integer >= 2, got {self.N!r}")
        if not self.a > 0:
            raise PhysicsDomainError(f"lattice constant must be positive, got {self.a!r}")
        object.__setattr__(self, "Jrate", float(np.real(self.Jrate)))
        object.__setattr__(self, "N", int(self.N))

    @property
    def n_sublattices(self):
        return 2 if self.kind == "checkerboard" else 1

    @property
    def n_sites(self):
        if self.kind == "checkerboard":
            return self.n_sublattices * self.N**2
        return self.N

    @property
    def bravais(self):
        """Bravais vectors as rows (m)."""
        if self.kind == "checkerboard":
            return self.a * np.array([[2.0, 0.0], [1.0, 1.0]])
        return np.array([[self.a]])

    @property
    def reciprocal(self):
        """Reciprocal vectors b_i with b_i . v_j = 2 pi delta_ij, as rows (rad/m)."""
        return 2 * np.pi * np.linalg.inv(self.bravais).T

    def with_omega0(self, omega0):
        return LatticeSpec(self.kind, omega0, self.Jrate, self.a, self.N, self.boundary)


def chain_lattice_constant(d, l):
    """Site spacing of the 1D lattice: loop diameter plus two magnet gaps."""
    return 2.0 * (d + l)


def checkerboard_lattice_constant(d, l):
    return np.sqrt(2.0) * (l + d)


@dataclass
class BandResult:
    """Sampled band structure.

    ``bands[i, nu]`` is the frequency (rad/s) of band ``labels[nu]`` at
    ``kpoints[i]``. Bands are sorted in ascending order at each k.
    """

    kpoints: np.ndarray
    bands: np.ndarray
    labels: np.ndarray = field(default=None)

    def __post_init__(self):
        self.kpoints = np.asarray(self.kpoints, dtype=float)
        if self.kpoints.ndim == 1:
            self.kpoints = self.kpoints[:, None]
        self.bands = np.asarray(self.bands, dtype=float).reshape(self.kpoints.shape[0], -1)
        if self.labels is None:
            self.labels = np.arange(self.bands.shape[1])

    @property
    def n_bands(self):
        return self.bands.shape[1]

    def rows(self):
        """Yield (k components..., band_index, omega) in k-major order."""
        for k, w in zip(self.kpoints, self.bands):
            for nu, omega in zip(self.labels, w):
                yield (*k, int(nu), float(omega))


def write_band_csv(result, fh, fmt=".12g"):
    """Write a :class:`BandResult` as CSV to the open text file ``fh``."""
    dim = result.kpoints.shape[1]
    header = ["kx", "ky"][:dim] + ["band_index", "omega_rad_s", "omega_hz"]
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in result.rows():
        *k, nu, omega = row
        writer.writerow([format(x + 0.0, fmt) for x in k] + [nu, format(omega, fmt), format(omega / (2 * np.pi), fmt)])


def _require(spec, *kinds):
    if spec.kind not in kinds:
        raise ConfigurationError(f"operation needs lattice kind in {kinds}, got {spec.kind!r}", path="lattice.kind")


def _bonds(spec):
    if spec.kind == "chain":
        return _CHAIN_BONDS, np.zeros((1, 1))
    return _CHECKERBOARD_BONDS, np.array(_CHECKERBOARD_BASIS)


def bloch_matrices(spec, k):
    """Bloch matrices H(k) (rad/s) for wavevectors ``k`` of shape (..., dim).

    Uses the site-position gauge, in which each bond contributes
    J exp(i k . (R + tau_to - tau_from)).
    """
    _require(spec, "chain", "checkerboard")
    bonds, basis = _bonds(spec)
    k = np.asarray(k, dtype=float)
    dim = spec.bravais.shape[0]
    if dim == 1 and (k.ndim == 0 or k.shape[-1] != 1):
        k = k[..., None]
    nsub = spec.n_sublattices
    H = np.zeros(k.shape[:-1] + (nsub, nsub), dtype=complex)
    H[..., np.arange(nsub), np.arange(nsub)] = spec.omega0
    for s_from, s_to, shift in bonds:
        frac = np.asarray(shift, dtype=float) + basis[s_to] - basis[s_from]
        disp = frac @ spec.bravais
        term = spec.Jrate * np.exp(1j * (k @ disp))
        H[..., s_from, s_to] += term
        H[..., s_to, s_from] += np.conj(term)
    return H


def allowed_kpoints(spec, nk=None):
    """Wavevectors compatible with ``nk`` periodic cells per dimension (default ``spec.N``).

    k = (n1 b1 + n2 b2) / nk with n_i in [-nk/2, nk/2 - 1].
    """
    nk = spec.N if nk is None else int(nk)
    n = np.arange(nk) - nk // 2
    b = spec.reciprocal
    if b.shape[0] == 1:
        return (n[:, None] * b[0]) / nk
    n1, n2 = np.meshgrid(n, n, indexing="ij")
    return (n1.ravel()[:, None] * b[0] + n2.ravel()[:, None] * b[1]) / nk


def chain_dispersion(spec, nk=None):
    """omega(k) = omega0 + 2 J cos(k a) on ``nk`` evenly spaced k (default ``spec.N``)."""
    _require(spec, "chain")
    k = allowed_kpoints(spec, nk)
    omega = spec.omega0 + 2 * spec.Jrate * np.cos(k[:, 0] * spec.a)
    return BandResult(kpoints=k, bands=omega[:, None])


def ring_spectrum(spec):
    """Eigenvalues of omega0 I + J (11^T - I), ascending.

    The all-to-all ring has one collective mode at omega0 + (N - 1) J and an
    (N - 1)-fold degenerate level at omega0 - J.
    """
    _require(spec, "ring")
    levels = np.full(spec.N, spec.omega0 - spec.Jrate)
    levels[0] = spec.omega0 + (spec.N - 1) * spec.Jrate
    return np.sort(levels)


def checkerboard_bloch(spec, k):
    """Two band frequencies (omega_plus, omega_minus) at wavevector ``k`` = (kx, ky)."""
    _require(spec, "checkerboard")
    w = np.linalg.eigvalsh(bloch_matrices(spec, np.asarray(k, dtype=float)))
    return w[..., 1], w[..., 0]


def checkerboard_bands(spec, kpoints=None, nk=None):
    """Sampled checkerboard bands; defaults to the ``nk`` x ``nk`` allowed grid."""
    _require(spec, "checkerboard")
    k = allowed_kpoints(spec, nk) if kpoints is None else np.asarray(kpoints, dtype=float).reshape(-1, 2)
    return BandResult(kpoints=k, bands=np.linalg.eigvalsh(bloch_matrices(spec, k)))


def bands(spec, nk=None):
    """Band structure of a chain or checkerboard on its allowed k grid."""
    if spec.kind == "chain":
        return chain_dispersion(spec, nk)
    return checkerboard_bands(spec, nk=nk)


def paper_closed_form_bands(spec, k):
    """Printed two-band closed form, kept for comparison only.

    omega_pm = omega0 + 2 J [4 cos(kx a) cos(ky a) +- sqrt(Lambda)]. Where
    Lambda < 0 the result is complex; nothing is raised.
    """
    _require(spec, "checkerboard")
    k = np.asarray(k, dtype=float)
    ca, sa = k[..., 0] * spec.a, k[..., 1] * spec.a
    lam = (4 + 4 * np.cos(ca) * np.cos(sa) - np.cos(2 * sa) - np.cos(ca)
           + 2 * np.cos(2 * ca) * np.cos(2 * sa))
    root = np.emath.sqrt(lam)
    centre = 4 * np.cos(ca) * np.cos(sa)
    return (spec.omega0 + 2 * spec.Jrate * (centre + root),
            spec.omega0 + 2 * spec.Jrate * (centre - root))


def closed_form_report(spec, nk=64, atol_rel=1e-6):
    """Compare the printed closed form against the bond-list bands on an nk x nk grid.

    Returns
    -------
    dict with the number of sampled k, the count and fraction of k where the
    two disagree by more than ``atol_rel * |J|``, the count of k with a
    complex closed-form band, and the largest deviation in units of J.
    """
    _require(spec, "checkerboard")
    k = allowed_kpoints(spec, nk)
    up, lo = checkerboard_bloch(spec, k)
    cp, cm = paper_closed_form_bands(spec, k)
    complex_mask = (np.abs(np.imag(cp)) > 0) | (np.abs(np.imag(cm)) > 0)
    ref = np.sort(np.stack([lo, up], axis=-1), axis=-1)
    # order complex values by real part, then compare including the imaginary parts
    cf = np.stack([cm, cp], axis=-1)
    cf = np.take_along_axis(cf, np.argsort(cf.real, axis=-1), axis=-1)
    scale = abs(spec.Jrate) if spec.Jrate != 0 else 1.0
    dev = np.max(np.abs(cf - ref), axis=-1) / scale
    bad = dev > atol_rel
    return {
        "n_k": int(len(k)),
        "n_mismatch": int(bad.sum()),
        "mismatch_fraction": float(bad.mean()),
        "n_complex": int(complex_mask.sum()),
        "max_deviation_over_J": float(dev.max()),
        "mismatch_k": k[bad],
    }


def real_space_hamiltonian(spec):
    """Dense real-space hopping matrix (rad/s) including the on-site term.

    Site index for the checkerboard is sublattice + 2 * (n1 * N + n2).
    """
    N = spec.N
    if spec.n_sites > MAX_ORACLE_SITES:
        raise ConfigurationError(
            f"{spec.n_sites} sites exceed the dense-diagonalization budget of {MAX_ORACLE_SITES}", path="lattice.N")
    H = np.eye(spec.n_sites) * spec.omega0
    J = spec.Jrate
    if spec.kind == "ring":
        return H + J * (np.ones_like(H) - np.eye(spec.n_sites))
    periodic = spec.boundary == "periodic"
    bonds, _ = _bonds(spec)
    dim = spec.bravais.shape[0]
    nsub = spec.n_sublattices
    cells = np.array(np.meshgrid(*[np.arange(N)] * dim, indexing="ij")).reshape(dim, -1).T

    def index(cell, sub):
        flat = 0
        for c in cell:
            flat = flat * N + c
        return sub + nsub * flat

    for cell in cells:
        for s_from, s_to, shift in bonds:
            target = cell + np.asarray(shift)
            if periodic:
                target = target % N
            elif np.any((target < 0) | (target >= N)):
                continue
            i, j = index(cell, s_from), index(target, s_to)
            # accumulate, so that N = 2 wraps both ways like the Bloch sum
            H[i, j] += J
            H[j, i] += J
    return H


def finite_lattice_oracle(spec):
    """Eigenvalues (ascending) of the dense real-space Hamiltonian."""
    return np.linalg.eigvalsh(real_space_hamiltonian(spec))


def bloch_multiset(spec):
    """Union of Bloch (or closed-form) eigenvalues over the allowed k, ascending.

    Only defined for periodic boundaries, except for the ring, where it is
    the all-to-all closed form.
    """
    if spec.kind == "ring":
        return ring_spectrum(spec)
    if spec.boundary != "periodic":
        raise ConfigurationError("Bloch spectrum requires periodic boundaries", path="lattice.boundary")
    return np.sort(bands(spec).bands.ravel())


def density_of_states(spec, nbins=200, nk=512, band: Optional[int] = None):
    """Histogram density of states, normalized to unit integral.

    Bands are sampled on a uniform ``nk`` grid per dimension spanning one
    Brillouin zone. ``band`` restricts the histogram to one band index.

    Returns
    -------
    centres, density, edges
    """
    _require(spec, "chain", "checkerboard")
    result = bands(spec, nk)
    values = result.bands if band is None else result.bands[:, band]
    values = np.ravel(values)
    density, edges = np.histogram(values, bins=int(nbins), density=True)
    return 0.5 * (edges[1:] + edges[:-1]), density, edges
