"""Acceptance criteria, one test per criterion.

Each test records (passed, detail) in ``conftest.ACCEPTANCE``; the terminal
summary prints one PASS/FAIL line per criterion.
"""
import time
import warnings

import numpy as np
import pytest

from conftest import ACCEPTANCE
from hml.couplings import qubit_coupling, single_loop_pair
from hml.dynamics import TwoSiteModel, build_full_model, evolve, fit_alpha, optimize_epsilon, swap_fidelity
from hml.errors import ValidityWarning
from hml.geometry import (LoopSpec, Placement, circular_flux_integrals, critical_distance, dipole_field,
                          flux_factors_circular)
from hml.lattice import LatticeSpec, bloch_matrices, bloch_multiset, chain_dispersion, finite_lattice_oracle, \
    real_space_hamiltonian
from hml.units import magnet_moment, yig_preset

TWO_PI = 2 * np.pi


def record(n, checks, extra=""):
    """Store the verdict for criterion ``n``; ``checks`` maps a label to (ok, text)."""
    ok = all(c[0] for c in checks.values())
    parts = [f"{k}={'ok' if c[0] else 'FAIL'} ({c[1]})" for k, c in checks.items()]
    ACCEPTANCE[n] = (ok, "; ".join(parts) + (f"; {extra}" if extra else ""))
    return ok


def within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


@pytest.fixture(scope="module")
def measured_alpha():
    """fit_alpha at g/J = 0.05, shared by criteria 6 and 7."""
    t0 = time.perf_counter()
    fit = fit_alpha(TwoSiteModel.from_detuning(1.0, 1.0, 0.05), n_points=10)
    return fit, time.perf_counter() - t0


def test_criterion_01_geometry_factor():
    t0 = time.perf_counter()
    ff = flux_factors_circular(LoopSpec(30e-6, 50e-9), Placement(1.5e-6), yig_preset())
    dt = time.perf_counter() - t0
    ok = record(1, {
        "I": (within(ff.Ix, 1.9, 0.15), f"I={ff.Ix:.5f} vs 1.9 +/-15%"),
        "runtime": (dt < 1.0, f"{dt:.3f} s < 1 s"),
    })
    assert ok, ACCEPTANCE[1][1]


def test_criterion_02_tunneling_ratio():
    t0 = time.perf_counter()
    r = single_loop_pair(LoopSpec(30e-6, 50e-9), Placement(1.5e-6), 1e-6, yig_preset(), 0.07)
    dt = time.perf_counter() - t0
    j, jd = r.J12 / TWO_PI, r.Jd12 / TWO_PI
    ok = record(2, {
        "ratio": (50 <= r.ratio <= 115, f"J12/Jd12={r.ratio:.2f}"),
        "ratio_large_loop": (50 <= r.ratio_paper_formula <= 115, f"{r.ratio_paper_formula:.2f}"),
        "J12": (0.1 <= j / 5.85e6 <= 10, f"{j / 1e6:.4f} MHz vs 5.85 MHz"),
        "Jd12": (0.1 <= jd / 0.09e6 <= 10, f"{jd / 1e6:.5f} MHz vs 0.09 MHz"),
        "runtime": (dt < 1.0, f"{dt:.3f} s"),
    }, extra=f"I_12 = I reading gives ratio {r.ratio_linear_I:.2f} (reported only)")
    assert ok, ACCEPTANCE[2][1]


def test_criterion_03_band_oracle():
    t0 = time.perf_counter()
    J = TWO_PI * 2.0556e6
    checks = {}
    for kind, N in (("chain", 8), ("ring", 6), ("checkerboard", 6)):
        spec = LatticeSpec(kind, TWO_PI * 2.6749e9, J, N=N)
        dev = float(np.max(np.abs(finite_lattice_oracle(spec) - bloch_multiset(spec)))) / J
        checks[kind] = (dev < 1e-9, f"max dev {dev:.1e} J")
    dt = time.perf_counter() - t0
    checks["runtime"] = (dt < 10.0, f"{dt:.3f} s")
    ok = record(3, checks)
    assert ok, ACCEPTANCE[3][1]


def test_criterion_04_chain_band_edges():
    w0, J = TWO_PI * 2.6749e9, TWO_PI * 2.0556e6
    r = chain_dispersion(LatticeSpec("chain", w0, J, N=64))
    hi = abs(r.bands.max() - (w0 + 2 * J)) / (w0 + 2 * J)
    lo = abs(r.bands.min() - (w0 - 2 * J)) / (w0 - 2 * J)
    ok = record(4, {"upper": (hi <= 1e-12, f"rel {hi:.1e}"), "lower": (lo <= 1e-12, f"rel {lo:.1e}")})
    assert ok, ACCEPTANCE[4][1]


def test_criterion_05_coupling_scaling_law():
    t0 = time.perf_counter()
    mat = yig_preset()
    worst = 0.0
    for R in np.geomspace(100, 1000, 7):
        for rq in np.linspace(R * 1.001, 3 * R, 8):
            g = qubit_coupling(np.pi / 2, 0.0, rq * 1e-9, R * 1e-9, mat, 0.07).g / TWO_PI
            law = 5.2e2 * (np.sqrt(R) / rq) ** 3 * 1e6
            worst = max(worst, abs(g / law - 1))
    dt = time.perf_counter() - t0
    ok = record(5, {"law": (worst <= 0.05, f"worst deviation {worst:.2%}"), "runtime": (dt < 1.0, f"{dt:.3f} s")})
    assert ok, ACCEPTANCE[5][1]


def test_criterion_06_alpha_regression(measured_alpha):
    fit, dt = measured_alpha
    ok = record(6, {
        "alpha_gamma": (within(fit.alpha_gamma, 0.779, 0.15), f"{fit.alpha_gamma:.4f} vs 0.779 +/-15%"),
        "alpha_kappa": (within(fit.alpha_kappa, 0.006, 0.5), f"{fit.alpha_kappa:.4f} vs 0.006 +/-50%"),
        "R2": (min(fit.r2_gamma, fit.r2_kappa) >= 0.98, f"{fit.r2_gamma:.4f}, {fit.r2_kappa:.4f}"),
        "runtime": (dt < 300, f"{dt:.1f} s"),
    }, extra=f"slope against kappa/g_eff: {fit.alpha_kappa_caption:.4f}")
    assert ok, ACCEPTANCE[6][1]


def test_criterion_07_optimal_error(measured_alpha):
    fit, _ = measured_alpha
    ag, ak = fit.alpha_gamma, fit.alpha_kappa
    t0 = time.perf_counter()
    checks = {}
    g, ratio = 1.0, 333.0
    for C0 in (1e2, 1e3, 1e4):
        gamma = g / np.sqrt(C0 * ratio)
        m = TwoSiteModel.from_detuning(1.0, 1.0, g, kappa=ratio * gamma, gamma=gamma)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            rep = optimize_epsilon(m, alpha_gamma=ag, alpha_kappa=ak)
        target = np.sqrt(ak * ag / (2 * C0))
        checks[f"C0={C0:.0e}"] = (within(rep.epsilon_star, target, 0.2),
                                  f"eps*={rep.epsilon_star:.3e} vs {target:.3e}, ratio {rep.epsilon_star / target:.2f}")
    dt = time.perf_counter() - t0
    checks["runtime"] = (dt < 600, f"{dt:.1f} s")
    ok = record(7, checks)
    assert ok, ACCEPTANCE[7][1]


def test_criterion_08_effective_vs_full():
    g, J = 0.05, 1.0
    out = swap_fidelity(TwoSiteModel.from_detuning(J, J, g))
    g_eff = 2 * g * g / J
    t_ref = np.pi / (2 * g_eff)
    ok = record(8, {
        "t_star": (within(out.t_star, t_ref, 0.02), f"t*={out.t_star:.2f} vs pi/(2 g_eff)={t_ref:.2f}, "
                                                    f"ratio {out.t_star / t_ref:.3f}"),
        "epsilon": (out.epsilon < 1e-3, f"eps={out.epsilon:.2e}"),
    })
    assert ok, ACCEPTANCE[8][1]


def test_criterion_09_open_system_sanity():
    checks = {}
    mixed = TwoSiteModel.from_detuning(1.0, 1.0, 0.3, kappa=0.02, gamma=0.01)
    s = build_full_model(mixed)
    tr = evolve(s, s.basis_state("10,vac"), np.linspace(0, 200, 401))
    checks["trace"] = (tr.trace_drift < 1e-8, f"drift {tr.trace_drift:.1e}")
    checks["hermiticity"] = (tr.hermiticity < 1e-10, f"{tr.hermiticity:.1e}")

    s = build_full_model(mixed.replace(kappa=0.0, gamma=0.0))
    tr = evolve(s, s.basis_state("10,vac"), np.linspace(0, 200, 401))
    dp = float(np.max(np.abs(tr.purity() - 1)))
    checks["purity"] = (dp < 1e-8, f"max |Tr rho^2 - 1| {dp:.1e}")

    kappa = 0.05
    s = build_full_model(TwoSiteModel.from_detuning(1.0, 1.0, 0.0, kappa=kappa))
    t = np.linspace(0, 60, 121)
    pop = evolve(s, s.basis_state("00,1+"), t).population(2)
    rel = float(np.max(np.abs(pop / np.exp(-kappa * t) - 1)))
    checks["decay"] = (rel < 1e-6, f"max rel dev from exp(-kappa t) {rel:.1e}")
    ok = record(9, checks)
    assert ok, ACCEPTANCE[9][1]


def test_criterion_10_property_suite(rng):
    checks = {}
    mat = yig_preset()

    # units: F ~ R^3
    R = rng.uniform(1e-8, 1e-5, 20)
    dev = max(abs(magnet_moment(2 * r, mat)[1] / (8 * magnet_moment(r, mat)[1]) - 1) for r in R)
    checks["F~R^3"] = (dev < 1e-12, f"{dev:.1e}")

    # geometry
    diff = max(np.max(np.abs(np.subtract(circular_flux_integrals(x, y, order=16)[0],
                                         circular_flux_integrals(x, y, order=32)[0])))
               for x, y in ((20, 0), (100, 1), (1000, 2), (5, 0.5)))
    checks["quadrature"] = (diff < 1e-8, f"node doubling changes I by {diff:.1e}")
    h = np.linspace(0, 2, 9)
    lim = np.array([[circular_flux_integrals(x, y)[0] for y in h] for x in (100, 1000)])
    iz_dev = float(np.max(np.abs(lim[0, 1:, 1] / lim[1, 1:, 1] - 1)))
    ix_dev = float(np.max(np.abs(lim[0, :, 0] / lim[1, :, 0] - 1)))
    checks["large-loop Iz"] = (iz_dev <= 0.02, f"l/d 100 vs 1000: {iz_dev:.2%}")
    checks["large-loop Ix"] = (ix_dev <= 0.02, f"l/d 100 vs 1000: {ix_dev:.2%}")
    mu, r = rng.normal(size=3), rng.normal(size=3)
    checks["dipole antisymmetry"] = (np.array_equal(dipole_field(mu, 0 * r, r), -dipole_field(-mu, 0 * r, r)), "exact")
    dc = [critical_distance(350e-9, mat, b, 50e-9) for b in np.geomspace(1e-3, 10, 30)]
    checks["d_c monotone"] = (bool(np.all(np.diff(dc) < 0)), "decreasing in Bc")

    # couplings
    from hml.couplings import loop_tunneling
    from hml.geometry import FluxFactors, flux_scale
    fi = FluxFactors(1.3, 0.4, 0, flux_scale(1e-6, mat), 0)
    fj = FluxFactors(0.2, -1.1, 0, flux_scale(2e-6, mat), 0)
    checks["J hermitian"] = (loop_tunneling(fi, fj, 3e-10, 1e9) == np.conj(loop_tunneling(fj, fi, 3e-10, 1e9)), "exact")
    import dataclasses
    a = single_loop_pair(LoopSpec(30e-6, 50e-9), Placement(1.5e-6), 1e-6, mat, 0.07)
    b = single_loop_pair(LoopSpec(30e-6, 50e-9), Placement(1.5e-6), 1e-6, dataclasses.replace(mat, Ms=2 * mat.Ms), 0.07)
    checks["ratio F-free"] = (abs(a.ratio / b.ratio - 1) < 1e-12, f"{abs(a.ratio / b.ratio - 1):.1e}")
    ls = np.geomspace(15e-6, 1.5e-3, 9)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        Js = [single_loop_pair(LoopSpec(l, 50e-9), Placement(1.5e-6), 1e-6, mat, 0.07).J12 for l in ls]
    slope = np.polyfit(np.log(ls), np.log(Js), 1)[0]
    checks["1/l slope"] = (-1.15 <= slope <= -0.95, f"{slope:.3f}")
    worst, branch = 0.0, True
    for th in np.linspace(0.05, np.pi - 0.05, 24):
        q = qubit_coupling(th, 0.3, 370e-9, 350e-9, mat, 0.07)
        worst = max(worst, abs((q.omega_sigma**2 - q.omega_sigma_bare**2) / (q.F * q.xi_theta**2) - 1))
        if q.xi_theta / q.omega_sigma_bare < 0:
            branch &= q.Theta > np.pi / 2
    checks["dressed identity"] = (worst < 1e-10, f"{worst:.1e}")
    checks["Theta branch"] = (bool(branch), "sign rule")

    # lattice
    spec = LatticeSpec("checkerboard", 0.0, 1.0, N=4)
    H = real_space_hamiltonian(spec)
    U = np.diag(np.exp(1j * rng.uniform(0, TWO_PI, H.shape[0])))
    gdev = float(np.max(np.abs(np.linalg.eigvalsh(U @ H @ U.conj().T) - np.linalg.eigvalsh(H))))
    checks["gauge"] = (gdev < 1e-9, f"{gdev:.1e} J")
    k = rng.uniform(-np.pi, np.pi, size=(100, 2))
    w1 = np.linalg.eigvalsh(bloch_matrices(spec, k))
    w2 = np.linalg.eigvalsh(bloch_matrices(spec, -k))
    checks["k->-k"] = (float(np.max(np.abs(w1 - w2))) < 1e-12, f"{np.max(np.abs(w1 - w2)):.1e} J")
    w3 = np.linalg.eigvalsh(bloch_matrices(spec.with_omega0(0.37), k))
    checks["d omega/d omega0"] = (float(np.max(np.abs(w3 - w1 - 0.37))) < 1e-12, "unit slope")

    # dynamics: monotone epsilon in the decoherence rates
    base = TwoSiteModel.from_detuning(1.0, 1.0, 0.05)
    eps_k = [swap_fidelity(base.replace(kappa=x)).epsilon for x in (1e-4, 1e-3, 1e-2)]
    eps_g = [swap_fidelity(base.replace(gamma=x)).epsilon for x in (1e-6, 1e-5, 1e-4)]
    checks["eps monotone"] = (bool(np.all(np.diff(eps_k) > 0) and np.all(np.diff(eps_g) > 0)), "kappa and gamma")
    ok = record(10, checks)
    assert ok, ACCEPTANCE[10][1]
