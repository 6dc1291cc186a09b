"""Two qubits coupled through a pair of loop-coupled magnets.

Everything runs in a frame rotating at the qubit frequency, so the
Hamiltonians only carry detunings. Two representations of the full model
are available:

* ``"sector"``: the five states {|10,vac>, |01,vac>, |00,1+>, |00,1->, |00,vac>}.
  The rotating-wave Hamiltonian conserves the excitation number and decay only
  lowers it, so a single excitation never leaves this set.
* ``"fock"``: qubit1 x qubit2 x mode1 x mode2 with a per-mode cutoff, used
  for validation.

Density matrices are vectorized row-major, vec(A rho B) = (A kron B^T) vec(rho).
"""
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import ConfigurationError, ConvergenceError, PhysicsDomainError, ValidityWarning
from .parallel import ordered_map

SECTOR_LABELS = ("10,vac", "01,vac", "00,1+", "00,1-", "00,vac")
MAX_STEP_PRODUCT = 0.05


@dataclass(frozen=True)
class TwoSiteModel:
    """Two magnets with hopping ``Jrate``, each carrying a spin qubit.

    Attributes
    ----------
    omega0, Jrate, omega_sigma, g : float
        (rad/s) magnon frequency, tunneling, qubit frequency, qubit-magnon coupling
    kappa : float
        (rad/s) magnon decay rate
    gamma : float
        (rad/s) qubit dephasing rate, pi / T2*
    """

    omega0: float
    Jrate: float
    omega_sigma: float
    g: float
    kappa: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("omega0", "Jrate", "omega_sigma", "g", "kappa", "gamma"):
            if not np.isfinite(getattr(self, name)):
                raise PhysicsDomainError(f"{name} must be finite")
        if self.kappa < 0 or self.gamma < 0:
            raise PhysicsDomainError(f"kappa and gamma must be >= 0, got {self.kappa!r}, {self.gamma!r}")

    @classmethod
    def from_T2(cls, omega0, Jrate, omega_sigma, g, kappa, T2_star):
        if not T2_star > 0:
            raise PhysicsDomainError(f"T2* must be positive, got {T2_star!r}")
        return cls(omega0, Jrate, omega_sigma, g, kappa, np.pi / T2_star)

    @classmethod
    def from_detuning(cls, Jrate, Delta, g, kappa=0.0, gamma=0.0, omega0=0.0):
        """Model with qubit detuning Delta = omega0 + J - omega_sigma."""
        return cls(omega0, Jrate, omega0 + Jrate - Delta, g, kappa, gamma)

    @property
    def Delta(self):
        return self.omega0 + self.Jrate - self.omega_sigma

    @property
    def omega_plus(self):
        return self.omega0 + self.Jrate

    @property
    def omega_minus(self):
        return self.omega0 - self.Jrate

    def replace(self, **kw):
        data = dict(omega0=self.omega0, Jrate=self.Jrate, omega_sigma=self.omega_sigma,
                    g=self.g, kappa=self.kappa, gamma=self.gamma)
        data.update(kw)
        return TwoSiteModel(**data)


# ---------------------------------------------------------------------------
# Lindblad systems and integration


def _superop(H, jumps=(), extra=None):
    n = H.shape[0]
    eye = np.eye(n)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for A in jumps:
        AdA = A.conj().T @ A
        L += np.kron(A, A.conj()) - 0.5 * np.kron(AdA, eye) - 0.5 * np.kron(eye, AdA.T)
    if extra is not None:
        L += extra
    return L


@dataclass
class LindbladSystem:
    """Hamiltonian (rad/s), jump operators and the assembled Liouvillian.

    ``decay_scale`` is the dissipative rate entering the step-size rule,
    ``frame`` the rotating-frame frequency removed from ``H``.
    """

    H: np.ndarray
    jumps: list
    labels: Sequence[str]
    decay_scale: float = 0.0
    frame: float = 0.0
    extra: Optional[np.ndarray] = None
    index: dict = field(default_factory=dict)
    L: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=complex)
        self.L = _superop(self.H, self.jumps, self.extra)
        self._propagators = {}

    @property
    def dim(self):
        return self.H.shape[0]

    @property
    def max_frequency(self):
        return float(np.max(np.abs(np.linalg.eigvalsh(self.H))))

    def basis_state(self, label):
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        i = self.index[label]
        rho[i, i] = 1.0
        return rho

    def propagator(self, dt, step_factor=0.005):
        """RK4 propagator over ``dt``: S(h)^m with h = dt / m and h * rate <= step_factor."""
        if not 0 < step_factor <= MAX_STEP_PRODUCT:
            raise ConfigurationError(f"step_factor must lie in (0, {MAX_STEP_PRODUCT}], got {step_factor!r}")
        key = (round(float(dt), 15 - int(np.floor(np.log10(abs(dt) or 1.0)))), step_factor)
        P = self._propagators.get(key)
        if P is None:
            P = _rk4_power(self.L, float(dt), self.max_frequency + self.decay_scale, step_factor)
            self._propagators[key] = P
        return P


def _rk4_power(L, dt, rate, step_factor):
    m = max(1, int(np.ceil(abs(dt) * rate / step_factor)))
    hL = L * (dt / m)
    S = np.eye(L.shape[0], dtype=complex)
    term = S
    for k in range(1, 5):
        term = term @ hL / k
        S = S + term
    return np.linalg.matrix_power(S, m)


def _sector_system(m):
    D, J, g = m.Delta, m.Jrate, m.g
    H = np.zeros((5, 5), dtype=complex)
    H[2, 2] = D
    H[3, 3] = D - 2 * J
    s = g / np.sqrt(2)
    H[0, 2] = H[2, 0] = -s
    H[1, 2] = H[2, 1] = -s
    H[0, 3] = H[3, 0] = -s
    H[1, 3] = H[3, 1] = s
    fp = np.zeros((5, 5))
    fp[4, 2] = 1.0
    fm = np.zeros((5, 5))
    fm[4, 3] = 1.0
    z1 = np.diag([1.0, -1, -1, -1, -1])
    z2 = np.diag([-1.0, 1, -1, -1, -1])
    jumps = [np.sqrt(m.kappa) * fp, np.sqrt(m.kappa) * fm, np.sqrt(m.gamma) * z1, np.sqrt(m.gamma) * z2]
    return LindbladSystem(H, jumps, SECTOR_LABELS, decay_scale=m.kappa + m.gamma, frame=m.omega_sigma,
                          index={lab: i for i, lab in enumerate(SECTOR_LABELS)})


def _fock_system(m, n_max):
    nq, nm = 2, n_max + 1
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])  # index 0 = ground, 1 = excited
    sz = np.diag([-1.0, 1.0])
    a = np.diag(np.sqrt(np.arange(1, nm)), 1)
    eq, em = np.eye(nq), np.eye(nm)

    def op(q1=eq, q2=eq, m1=em, m2=em):
        return np.kron(np.kron(np.kron(q1, q2), m1), m2)

    a1, a2 = op(m1=a), op(m2=a)
    s1, s2 = op(q1=sm), op(q2=sm)
    detune = m.omega0 - m.omega_sigma
    H = detune * (a1.T @ a1 + a2.T @ a2) + m.Jrate * (a1.T @ a2 + a2.T @ a1)
    H = H - m.g * (s1.T @ a1 + s1 @ a1.T + s2.T @ a2 + s2 @ a2.T)
    jumps = [np.sqrt(m.kappa) * a1, np.sqrt(m.kappa) * a2,
             np.sqrt(m.gamma) * op(q1=sz), np.sqrt(m.gamma) * op(q2=sz)]
    labels = []
    for q1 in range(nq):
        for q2 in range(nq):
            for n1 in range(nm):
                for n2 in range(nm):
                    labels.append(f"{q1}{q2},{n1}{n2}")
    index = {lab: i for i, lab in enumerate(labels)}
    index["10,vac"] = index["10,00"]
    index["01,vac"] = index["01,00"]
    index["00,vac"] = index["00,00"]
    return LindbladSystem(H, jumps, labels, decay_scale=m.kappa + m.gamma, frame=m.omega_sigma, index=index)


def build_full_model(m, backend="sector", n_max=2):
    """Lindblad system of two qubits and two magnon modes in the rotating-wave approximation.

    Magnon decay enters as sqrt(kappa) f_j, qubit dephasing as
    gamma (sz rho sz - rho) per qubit.
    """
    if backend == "sector":
        return _sector_system(m)
    if backend == "fock":
        if int(n_max) < 1:
            raise ConfigurationError(f"Fock cutoff n_max must be >= 1, got {n_max!r}", path="dynamics.n_max")
        return _fock_system(m, int(n_max))
    raise ConfigurationError(f"unknown backend {backend!r}", path="dynamics.backend")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    trace_drift: float
    hermiticity: float
    min_eigenvalue: float

    def population(self, index):
        return self.states[:, index, index].real

    def purity(self):
        return np.einsum("tij,tji->t", self.states, self.states).real


def _check_state(rho, tol=1e-10):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise PhysicsDomainError("rho0 must be a square matrix")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise PhysicsDomainError("rho0 is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise PhysicsDomainError(f"rho0 has trace {np.trace(rho).real:.12g}, expected 1")
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise PhysicsDomainError("rho0 is not positive semidefinite")
    return rho


def evolve(system, rho0, t_grid, step_factor=0.005, tol_trace=1e-8, tol_positivity=1e-8):
    """Integrate the master equation with fixed-step fourth-order Runge-Kutta.

    The step h satisfies h * (max |eigenfrequency of H| + decay rates) <= step_factor,
    with ``step_factor`` capped at 0.05. Propagators for each distinct grid
    spacing are built once as powers of the exact one-step RK4 map.

    Raises
    ------
    ConvergenceError
        if the trace drifts by more than ``tol_trace`` or an eigenvalue drops below ``-tol_positivity``
    """
    rho = _check_state(rho0)
    if rho.shape[0] != system.dim:
        raise ConfigurationError(f"rho0 has dimension {rho.shape[0]}, system has {system.dim}")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 1 or np.any(np.diff(t) < 0):
        raise ConfigurationError("t_grid must be a non-decreasing 1D array")
    n = system.dim
    out = np.empty((len(t), n, n), dtype=complex)
    v = rho.reshape(-1)
    out[0] = rho
    for i in range(1, len(t)):
        dt = t[i] - t[i - 1]
        if dt > 0:
            v = system.propagator(dt, step_factor) @ v
        out[i] = v.reshape(n, n)
    drift = float(np.max(np.abs(np.einsum("tii->t", out) - 1)))
    herm = float(np.max(np.abs(out - np.conj(np.swapaxes(out, 1, 2)))))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (out + np.conj(np.swapaxes(out, 1, 2))))))
    if drift > tol_trace:
        raise ConvergenceError(f"trace drift {drift:.3e} exceeds {tol_trace:.1e}", achieved=drift)
    if min_eig < -tol_positivity:
        raise ConvergenceError(f"density matrix eigenvalue {min_eig:.3e} below -{tol_positivity:.1e}",
                               achieved=min_eig)
    return Trajectory(t, out, drift, herm, min_eig)


# ---------------------------------------------------------------------------
# Effective two-qubit description


@dataclass(frozen=True)
class EffectiveModel:
    """Dispersive two-qubit parameters (rad/s); ``C0`` is dimensionless."""

    Delta: float
    g_eff: float
    kappa_eff: float
    Gamma_eff: float
    omega_sigma_tilde: float
    C0: float
    gamma: float = 0.0
    omega_sigma: float = 0.0


def _is_resonant(Delta, J, g):
    scale = max(abs(J), abs(g), abs(Delta), 1e-300)
    return abs(Delta) <= 1e-12 * scale or abs(Delta - 2 * J) <= 1e-12 * scale


def effective_model(m, threshold=0.1, normalization="printed"):
    """Adiabatically eliminated magnon bus.

    With Delta = omega0 + J - omega_sigma:

        omega_sigma_tilde = omega_sigma - g^2 [1/(Delta - 2J) + 1/Delta]
        g_eff     = g^2 [1/Delta - 1/(Delta - 2J)]
        kappa_eff = kappa g^2 [Delta^2 + (Delta - 2J)^2] / [Delta^2 (Delta - 2J)^2]
        Gamma_eff = kappa g^2 [Delta^2 - (Delta - 2J)^2] / [Delta^2 (Delta - 2J)^2]

    ``normalization="half"`` divides each g^2 term by two, which is what a
    second-order elimination of the full five-state model gives.

    Raises
    ------
    PhysicsDomainError
        at Delta = 0 or Delta = 2J, where the elimination breaks down
    """
    D, J, g = m.Delta, m.Jrate, m.g
    if _is_resonant(D, J, g):
        raise PhysicsDomainError(f"qubit resonant with a magnon normal mode (Delta={D!r}, 2J={2 * J!r})")
    ratio = max(abs(g / D), abs(g / (D - 2 * J)))
    if ratio > threshold:
        warnings.warn(f"dispersive condition violated: g/|Delta| or g/|Delta-2J| = {ratio:.3g} > {threshold}",
                      ValidityWarning, stacklevel=2)
    if normalization == "printed":
        g2 = g * g
    elif normalization == "half":
        g2 = g * g / 2
    else:
        raise ConfigurationError(f"unknown normalization {normalization!r}")
    Dm = D - 2 * J
    denom = D**2 * Dm**2
    C0 = g * g / (m.gamma * m.kappa) if m.gamma * m.kappa > 0 else np.inf
    return EffectiveModel(
        Delta=D,
        g_eff=g2 * (1 / D - 1 / Dm),
        kappa_eff=m.kappa * g2 * (D**2 + Dm**2) / denom,
        Gamma_eff=m.kappa * g2 * (D**2 - Dm**2) / denom,
        omega_sigma_tilde=m.omega_sigma - g2 * (1 / Dm + 1 / D),
        C0=C0,
        gamma=m.gamma,
        omega_sigma=m.omega_sigma,
    )


def cooperativity(g, kappa, gamma):
    return g * g / (gamma * kappa)


def build_effective_system(eff):
    """Two-qubit Lindblad system (basis |q1 q2>, index 0 = ground) in the frame at omega_sigma."""
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])
    sz = np.diag([-1.0, 1.0])
    eye = np.eye(2)
    s = [np.kron(sm, eye), np.kron(eye, sm)]
    z = [np.kron(sz, eye), np.kron(eye, sz)]
    shift = eff.omega_sigma_tilde - eff.omega_sigma
    H = 0.5 * shift * (z[0] + z[1]) - eff.g_eff * (s[0].T @ s[1] + s[0] @ s[1].T)
    jumps = [np.sqrt(eff.kappa_eff) * s[0], np.sqrt(eff.kappa_eff) * s[1],
             np.sqrt(eff.gamma) * z[0], np.sqrt(eff.gamma) * z[1]]
    # collective term Gamma_eff * (s_i rho s_j^+ - {s_j^+ s_i, rho} / 2), i != j
    eye4 = np.eye(4)
    extra = np.zeros((16, 16), dtype=complex)
    for i, j in ((0, 1), (1, 0)):
        A, B = s[i], s[j].T
        BA = B @ A
        extra += eff.Gamma_eff * (np.kron(A, B.T) - 0.5 * np.kron(BA, eye4) - 0.5 * np.kron(eye4, BA.T))
    labels = ("00", "01", "10", "11")
    index = {"00": 0, "01": 1, "10": 2, "11": 3, "01,vac": 1, "10,vac": 2}
    return LindbladSystem(H, jumps, labels, decay_scale=eff.kappa_eff + abs(eff.Gamma_eff) + eff.gamma,
                          frame=eff.omega_sigma, extra=extra, index=index)


# ---------------------------------------------------------------------------
# State transfer


@dataclass
class SwapOutcome:
    """State-transfer fidelity F(t) = <01,vac| rho(t) |01,vac> from |10,vac>."""

    times: np.ndarray
    fidelity: np.ndarray
    t_star: float
    epsilon: float
    g_eff: float = np.nan
    kappa_eff: float = np.nan
    Gamma_eff: float = np.nan
    C0: float = np.nan
    alpha_gamma: Optional[float] = None
    alpha_kappa: Optional[float] = None

    def summary(self):
        return {
            "t_star_s": float(self.t_star),
            "epsilon": float(self.epsilon),
            "g_eff_rad_s": float(self.g_eff),
            "kappa_eff_rad_s": float(self.kappa_eff),
            "Gamma_eff_rad_s": float(self.Gamma_eff),
            "C0": float(self.C0),
            "alpha_gamma": self.alpha_gamma,
            "alpha_kappa": self.alpha_kappa,
        }


def _printed_rates(m):
    """Printed g_eff, kappa_eff, Gamma_eff without validity diagnostics (nan at resonance)."""
    if _is_resonant(m.Delta, m.Jrate, m.g):
        return np.nan, np.nan, np.nan
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        e = effective_model(m)
    return e.g_eff, e.kappa_eff, e.Gamma_eff


def transfer_fidelity(system, times, step_factor=0.005, refine=True, xtol=1e-6):
    """Fidelity trace on ``times`` plus the refined maximum (t_star, F_max)."""
    rho0 = system.basis_state("10,vac")
    target = system.index["01,vac"]
    traj = evolve(system, rho0, times, step_factor=step_factor)
    F = np.clip(traj.population(target), 0.0, 1.0)
    i = int(np.argmax(F))
    t_star, F_star = float(times[i]), float(F[i])
    if refine and 0 < i < len(times) - 1 and F[i] > 0:
        start = traj.states[i - 1].reshape(-1)
        t0 = times[i - 1]

        def neg(t):
            v = system.propagator(t - t0, step_factor) @ start if t > t0 else start
            return -v.reshape(system.dim, system.dim)[target, target].real

        res = minimize_scalar(neg, bracket=(times[i - 1], times[i], times[i + 1]), method="golden",
                              tol=xtol)
        if -res.fun > F_star:
            t_star, F_star = float(res.x), float(min(-res.fun, 1.0))
    return F, i, t_star, F_star


def swap_fidelity(m, t_max=None, nt=2048, backend="sector", n_max=2, step_factor=0.005):
    """SWAP fidelity between the two qubits through the magnon bus.

    The default window is [0, 3 pi / (2 |g_eff|)] with the printed g_eff.
    The coarse argmax on ``nt`` points is refined by golden-section search
    to a relative time resolution of 1e-6.
    """
    g_eff, k_eff, G_eff = _printed_rates(m)
    if t_max is None:
        if not np.isfinite(g_eff) or g_eff == 0:
            raise PhysicsDomainError("no dispersive g_eff to size the time window (resonant or g = 0); pass t_max")
        t_max = 3 * np.pi / (2 * abs(g_eff))
    elif np.isfinite(g_eff) and g_eff != 0 and t_max < np.pi / (2 * abs(g_eff)):
        warnings.warn("t_max is shorter than pi/(2 g_eff); the fidelity maximum may be missed",
                      ValidityWarning, stacklevel=2)
    if int(nt) < 3:
        raise ConfigurationError(f"nt must be >= 3, got {nt!r}", path="dynamics.n_t")
    times = np.linspace(0.0, float(t_max), int(nt))
    system = build_full_model(m, backend=backend, n_max=n_max)
    F, i, t_star, F_star = transfer_fidelity(system, times, step_factor)
    if i == len(times) - 1 and F_star > 0:
        warnings.warn("fidelity maximum sits at the end of the time window", ValidityWarning, stacklevel=2)
    C0 = cooperativity(m.g, m.kappa, m.gamma) if m.kappa * m.gamma > 0 else np.inf
    return SwapOutcome(times=times, fidelity=F, t_star=t_star, epsilon=float(1.0 - F_star),
                       g_eff=g_eff, kappa_eff=k_eff, Gamma_eff=G_eff, C0=C0)


def effective_swap_fidelity(m, times, normalization="printed", step_factor=0.005):
    """Fidelity trace of the effective two-qubit master equation on ``times``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        eff = effective_model(m, normalization=normalization)
    system = build_effective_system(eff)
    traj = evolve(system, system.basis_state("10"), np.asarray(times, dtype=float), step_factor=step_factor)
    return np.clip(traj.population(system.index["01"]), 0.0, 1.0)


# ---------------------------------------------------------------------------
# Error coefficients and optimization


@dataclass
class AlphaFit:
    """Through-origin slopes of epsilon versus the scaled decoherence rates.

    ``alpha_kappa`` is the slope against kappa_eff / g_eff and
    ``alpha_kappa_caption`` the slope against kappa / g_eff.
    """

    alpha_gamma: float
    alpha_kappa: float
    alpha_kappa_caption: float
    r2_gamma: float
    r2_kappa: float
    x: np.ndarray
    eps_gamma: np.ndarray
    eps_kappa: np.ndarray
    poor_linearity: bool

    def summary(self):
        return {
            "alpha_gamma": float(self.alpha_gamma),
            "alpha_kappa": float(self.alpha_kappa),
            "alpha_kappa_caption": float(self.alpha_kappa_caption),
            "r2_gamma": float(self.r2_gamma),
            "r2_kappa": float(self.r2_kappa),
            "poor_linearity": bool(self.poor_linearity),
        }


def _origin_fit(x, y):
    slope = float(x @ y / (x @ x))
    ss_res = float(np.sum((y - slope * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return slope, (1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0)


def fit_alpha(m, n_points=10, x_range=(1e-3, 1e-1), r2_min=0.98, nt=2048, workers=None):
    """Regress the SWAP error on kappa_eff/g_eff (gamma = 0) and gamma/g_eff (kappa = 0).

    The detuning is set to Delta = J; ``m`` supplies J and g. Sample
    points are log-spaced over ``x_range``.
    """
    if int(n_points) < 2:
        raise ConfigurationError("n_points must be >= 2")
    lo, hi = x_range
    if not 0 < lo < hi:
        raise ConfigurationError(f"x_range must satisfy 0 < lo < hi, got {x_range!r}")
    base = TwoSiteModel.from_detuning(m.Jrate, m.Jrate, m.g, omega0=m.omega0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        ref = effective_model(base.replace(kappa=1.0))
    x = np.logspace(np.log10(lo), np.log10(hi), int(n_points))
    kappa_per_x = ref.g_eff / ref.kappa_eff  # kappa giving kappa_eff / g_eff = 1
    jobs = [("kappa", xi) for xi in x] + [("gamma", xi) for xi in x]

    def run(job):
        kind, xi = job
        mm = base.replace(kappa=xi * kappa_per_x) if kind == "kappa" else base.replace(gamma=xi * ref.g_eff)
        return swap_fidelity(mm, nt=nt).epsilon

    eps = np.array(ordered_map(run, jobs, workers))
    eps_k, eps_g = eps[: len(x)], eps[len(x):]
    a_k, r2_k = _origin_fit(x, eps_k)
    a_g, r2_g = _origin_fit(x, eps_g)
    # kappa / g_eff = (kappa_eff / g_eff) * kappa_per_x / g_eff
    a_caption = a_k * ref.g_eff / kappa_per_x
    return AlphaFit(a_g, a_k, a_caption, r2_g, r2_k, x, eps_g, eps_k, bool(min(r2_g, r2_k) < r2_min))


def linear_error(m, alpha_gamma, alpha_kappa):
    """First-order error alpha_gamma gamma/g_eff + alpha_kappa kappa_eff/g_eff from the printed rates."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        e = effective_model(m)
    return alpha_gamma * m.gamma / abs(e.g_eff) + alpha_kappa * e.kappa_eff / abs(e.g_eff)


@dataclass
class OptimumReport:
    Delta_star: float
    J_star: float
    epsilon_star: float
    converged: bool
    n_evaluations: int
    C0: float
    alpha_gamma: float
    alpha_kappa: float
    analytic_Delta_star: float
    analytic_epsilon: float
    message: str = ""

    def summary(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in self.__dict__.items()}


def analytic_optimum(g, kappa, gamma, alpha_gamma, alpha_kappa):
    """Delta* = J* = sqrt(2 alpha_k g^2 kappa T2* / (pi alpha_g)) and epsilon* = sqrt(alpha_k alpha_g / (2 C0))."""
    T2 = np.pi / gamma
    J = np.sqrt(2 * alpha_kappa * g * g * kappa * T2 / (np.pi * alpha_gamma))
    eps = np.sqrt(alpha_kappa * alpha_gamma / (2 * cooperativity(g, kappa, gamma)))
    return J, eps


def optimize_epsilon(m, over=("Delta", "J"), objective="full", alpha_gamma=0.779, alpha_kappa=0.006,
                     dispersive_threshold=0.1, grid=9, maxiter=400, nt=1024, xatol=1e-3, workers=None):
    """Minimize the SWAP error over the detuning and optionally the tunneling rate.

    A coarse log-grid seeds a Nelder-Mead search in log-parameters.
    ``objective="full"`` simulates the five-state master equation;
    ``objective="linear"`` uses the first-order error with the given alphas.
    Points with g/|Delta| or g/|Delta - 2J| above ``dispersive_threshold``
    are excluded (set it to None to search everywhere).
    """
    over = tuple(over)
    if over not in (("Delta",), ("Delta", "J"), ("J", "Delta")):
        raise ConfigurationError(f"'over' must be ('Delta',) or ('Delta', 'J'), got {over!r}")
    if m.kappa == 0 and m.gamma == 0:
        raise PhysicsDomainError("kappa and gamma are both zero; the error has no optimum")
    if objective not in ("full", "linear"):
        raise ConfigurationError(f"unknown objective {objective!r}")
    g = abs(m.g)
    free_J = "J" in over
    counter = {"n": 0}

    def unpack(p):
        if free_J:
            J = np.exp(p[0])
            return J * np.exp(p[1]), J
        return np.exp(p[0]), m.Jrate

    @lru_cache(maxsize=None)
    def cost_cached(key):
        D, J = unpack(np.array(key))
        if _is_resonant(D, J, g):
            return np.inf
        if dispersive_threshold is not None and max(g / abs(D), g / abs(D - 2 * J)) > dispersive_threshold:
            return np.inf
        mm = TwoSiteModel.from_detuning(J, D, m.g, m.kappa, m.gamma, omega0=m.omega0)
        counter["n"] += 1
        if objective == "linear":
            return float(linear_error(mm, alpha_gamma, alpha_kappa))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            try:
                return float(swap_fidelity(mm, nt=nt).epsilon)
            except ConvergenceError:
                # extremely long windows accumulate rounding; treat as inadmissible
                return np.inf

    def cost(p):
        return cost_cached(tuple(np.round(p, 12)))

    # coarse grid: J in [g, 1e3 g], Delta / J in [0.1, 10] (log)
    ratios = np.linspace(np.log(0.1), np.log(10.0), grid)
    if free_J:
        pts = [(np.log(g) + a, b) for a in np.linspace(0, np.log(1e3), grid) for b in ratios]
    else:
        centre = np.log(abs(m.Jrate) if m.Jrate != 0 else g)
        pts = [(centre + b,) for b in np.linspace(np.log(0.1), np.log(10.0), 2 * grid + 1)]
    values = ordered_map(lambda p: cost(np.array(p)), pts, workers)
    best = int(np.argmin(values))
    if not np.isfinite(values[best]):
        raise ConvergenceError("no admissible starting point in the coarse grid")
    res = minimize(cost, np.array(pts[best]), method="Nelder-Mead",
                   options={"xatol": xatol, "fatol": 1e-12, "maxiter": maxiter})
    D, J = unpack(res.x)
    if m.kappa > 0 and m.gamma > 0:
        aJ, aeps = analytic_optimum(g, m.kappa, m.gamma, alpha_gamma, alpha_kappa)
        C0 = cooperativity(g, m.kappa, m.gamma)
    else:
        aJ, aeps, C0 = np.nan, np.nan, np.inf
    return OptimumReport(Delta_star=float(D), J_star=float(J), epsilon_star=float(res.fun),
                         converged=bool(res.success), n_evaluations=counter["n"], C0=float(C0),
                         alpha_gamma=alpha_gamma, alpha_kappa=alpha_kappa,
                         analytic_Delta_star=float(aJ), analytic_epsilon=float(aeps), message=str(res.message))


def cooperativity_map(g, kappa_values, T2_values):
    """C0 = g^2 / (gamma kappa) with gamma = pi / T2 on the grid (kappa rows, T2 columns)."""
    k = np.asarray(kappa_values, dtype=float)
    T2 = np.asarray(T2_values, dtype=float)
    if np.any(k <= 0) or np.any(T2 <= 0):
        raise PhysicsDomainError("kappa and T2 values must be positive")
    gamma = np.pi / T2
    return g * g / (k[:, None] * gamma[None, :])
