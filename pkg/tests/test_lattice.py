import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hml.errors import ConfigurationError, PhysicsDomainError
from hml.lattice import (LatticeSpec, allowed_kpoints, bands, bloch_matrices, bloch_multiset, chain_dispersion,
                         chain_lattice_constant, checkerboard_bands, checkerboard_bloch,
                         checkerboard_lattice_constant, closed_form_report, density_of_states, finite_lattice_oracle,
                         paper_closed_form_bands, real_space_hamiltonian, ring_spectrum, write_band_csv)

W0 = 2 * np.pi * 2.6749e9
J = 2 * np.pi * 2.0556e6


def spec(kind, N, **kw):
    return LatticeSpec(kind, kw.pop("omega0", W0), kw.pop("Jrate", J), N=N, **kw)


# --- LatticeSpec --------------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        LatticeSpec("kagome", W0, J)
    with pytest.raises(ConfigurationError):
        LatticeSpec("chain", W0, J, boundary="twisted")
    with pytest.raises(PhysicsDomainError):
        LatticeSpec("chain", W0, J, N=1)
    with pytest.raises(PhysicsDomainError):
        LatticeSpec("chain", W0, 1 + 1j)
    with pytest.raises(PhysicsDomainError):
        LatticeSpec("chain", W0, J, a=0.0)
    assert LatticeSpec("chain", W0, complex(J, 0)).Jrate == J


def test_lattice_constants():
    assert chain_lattice_constant(1.5e-6, 30e-6) == pytest.approx(63e-6)
    assert checkerboard_lattice_constant(450e-9, 5e-6) == pytest.approx(np.sqrt(2) * 5.45e-6)
    s = LatticeSpec("checkerboard", W0, J, a=2.0)
    np.testing.assert_allclose(s.reciprocal @ s.bravais.T, 2 * np.pi * np.eye(2), atol=1e-14)


def test_wrong_kind_rejected():
    with pytest.raises(ConfigurationError):
        chain_dispersion(spec("ring", 4))
    with pytest.raises(ConfigurationError):
        ring_spectrum(spec("chain", 4))
    with pytest.raises(ConfigurationError):
        checkerboard_bloch(spec("chain", 4), [0.0, 0.0])


# --- chain ----------------------------------------------------------------------------


def test_chain_special_points():
    s = spec("chain", 8, a=63e-6)
    r = chain_dispersion(s)
    k = r.kpoints[:, 0]
    assert r.bands[k == 0, 0][0] == W0 + 2 * J
    i = np.argmin(np.abs(k + np.pi / s.a))
    assert r.bands[i, 0] == pytest.approx(W0 - 2 * J, rel=1e-15)


@pytest.mark.parametrize("N", [4, 6, 8, 10, 64])
def test_chain_bandwidth(N):
    r = chain_dispersion(spec("chain", N))
    assert r.bands.max() - r.bands.min() == pytest.approx(4 * J, rel=1e-12)
    assert r.bands.max() == pytest.approx(W0 + 2 * J, rel=1e-12)
    assert r.bands.min() == pytest.approx(W0 - 2 * J, rel=1e-12)


def test_chain_kgrid():
    s = spec("chain", 8, a=2.0)
    k = allowed_kpoints(s)[:, 0]
    np.testing.assert_allclose(k, 2 * np.pi * np.arange(-4, 4) / (8 * 2.0))


# --- ring ----------------------------------------------------------------------------------


def test_ring_two_sites():
    np.testing.assert_allclose(ring_spectrum(spec("ring", 2)), [W0 - J, W0 + J], rtol=1e-15)


def test_ring_five_sites():
    s = spec("ring", 5)
    ev = ring_spectrum(s)
    np.testing.assert_allclose(ev, [W0 - J] * 4 + [W0 + 4 * J], rtol=1e-15)
    dense = finite_lattice_oracle(s)
    np.testing.assert_allclose(dense, ev, atol=1e-9 * J, rtol=0)
    assert ev.sum() == pytest.approx(5 * W0, rel=1e-14)


# --- oracle equivalence -----------------------------------------------------------------


@pytest.mark.parametrize("kind,N", [("chain", 8), ("chain", 2), ("chain", 7), ("ring", 6), ("checkerboard", 6),
                                    ("checkerboard", 2), ("checkerboard", 5)])
def test_bloch_matches_finite_lattice(kind, N):
    s = spec(kind, N)
    np.testing.assert_allclose(finite_lattice_oracle(s), bloch_multiset(s), atol=1e-9 * J, rtol=0)


def test_checkerboard_oracle_on_shifted_frequency():
    s = spec("checkerboard", 6, omega0=0.0, Jrate=1.0)
    assert np.max(np.abs(finite_lattice_oracle(s) - bloch_multiset(s))) < 1e-12


def test_chain_oracle_closed_form():
    s = spec("chain", 8, omega0=0.0, Jrate=1.0)
    expected = np.sort(2 * np.cos(2 * np.pi * np.arange(8) / 8))
    np.testing.assert_allclose(finite_lattice_oracle(s), expected, atol=1e-10)


def test_oracle_size_budget():
    with pytest.raises(ConfigurationError):
        finite_lattice_oracle(spec("checkerboard", 17))
    with pytest.raises(ConfigurationError):
        bloch_multiset(spec("chain", 8, boundary="open"))


def test_open_chain_spectrum():
    s = spec("chain", 9, omega0=0.0, Jrate=1.0, boundary="open")
    expected = np.sort(2 * np.cos(np.pi * np.arange(1, 10) / 10))
    np.testing.assert_allclose(finite_lattice_oracle(s), expected, atol=1e-12)


@pytest.mark.parametrize("kind,N", [("chain", 8), ("ring", 6), ("checkerboard", 4)])
def test_spectrum_gauge_invariant(kind, N, rng):
    H = real_space_hamiltonian(spec(kind, N))
    U = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, H.shape[0])))
    np.testing.assert_allclose(np.linalg.eigvalsh(U @ H @ U.conj().T), np.linalg.eigvalsh(H), atol=1e-9 * J, rtol=0)


# --- checkerboard ---------------------------------------------------------------------------


def test_checkerboard_zero_hopping():
    s = spec("checkerboard", 4, Jrate=0.0)
    r = checkerboard_bands(s, nk=8)
    np.testing.assert_array_equal(r.bands, W0)


def test_checkerboard_gamma_point():
    s = spec("checkerboard", 4, omega0=0.0, Jrate=1.0)
    wp, wm = checkerboard_bloch(s, [0.0, 0.0])
    lam = np.linalg.eigvalsh(bloch_matrices(s, np.zeros(2)) / 2)
    assert (wm, wp) == pytest.approx((2 * lam[0], 2 * lam[1]), abs=1e-14)
    # D and A each have two same-sublattice bonds and four cross bonds
    assert (wm, wp) == pytest.approx((-2.0, 6.0), abs=1e-14)


def test_checkerboard_two_bands_hermitian(rng):
    s = spec("checkerboard", 4, a=3e-6)
    k = rng.uniform(-1, 1, size=(50, 2)) * np.pi / s.a
    H = bloch_matrices(s, k)
    np.testing.assert_allclose(H, np.conj(np.swapaxes(H, -1, -2)), rtol=0, atol=0)
    r = checkerboard_bands(s, kpoints=k)
    assert r.n_bands == 2 and np.all(r.bands[:, 1] >= r.bands[:, 0])


@settings(max_examples=40)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_checkerboard_inversion_symmetry(kx, ky):
    s = spec("checkerboard", 4, a=1.0)
    a = checkerboard_bloch(s, [kx, ky])
    b = checkerboard_bloch(s, [-kx, -ky])
    assert a[0] == pytest.approx(b[0], abs=1e-9 * J)
    assert a[1] == pytest.approx(b[1], abs=1e-9 * J)


@settings(max_examples=30)
@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(-1e10, 1e10))
def test_bands_shift_rigidly_with_site_frequency(kx, ky, dw):
    s = spec("checkerboard", 4, a=1.0)
    a = np.array(checkerboard_bloch(s, [kx, ky]))
    b = np.array(checkerboard_bloch(s.with_omega0(W0 + dw), [kx, ky]))
    np.testing.assert_allclose(b - a, dw, atol=1e-6 * J)


def test_rigid_shift_chain():
    s = spec("chain", 16)
    d = chain_dispersion(s.with_omega0(W0 + 1e9)).bands - chain_dispersion(s).bands
    np.testing.assert_allclose(d, 1e9, rtol=1e-12)


def test_printed_closed_form_examples():
    s = spec("checkerboard", 4, omega0=0.0, Jrate=1.0, a=1.0)
    wp, wm = paper_closed_form_bands(s, np.array([np.pi / 2, np.pi / 2]))
    assert (wp, wm) == pytest.approx((2 * np.sqrt(7), -2 * np.sqrt(7)), rel=1e-14)
    wp, wm = paper_closed_form_bands(s, np.zeros(2))
    assert (wp, wm) == pytest.approx((2 * (4 + 2 * np.sqrt(2)), 2 * (4 - 2 * np.sqrt(2))), rel=1e-14)


def test_closed_form_report_flags_disagreement():
    s = spec("checkerboard", 4, omega0=0.0, Jrate=1.0, a=1.0)
    rep = closed_form_report(s, nk=16)
    assert rep["n_k"] == 256
    assert rep["n_mismatch"] == len(rep["mismatch_k"])
    assert rep["n_mismatch"] > 0 and rep["max_deviation_over_J"] > 1e-6
    assert 0 < rep["n_complex"] < rep["n_k"]
    # the Gamma point alone already disagrees with the bond-list bands (6, -2)
    assert any(np.allclose(k, 0) for k in rep["mismatch_k"])


# --- density of states ------------------------------------------------------------------------


def test_dos_chain_edges_dominate():
    s = spec("chain", 8, omega0=0.0, Jrate=1.0)
    c, rho, e = density_of_states(s, nbins=100, nk=1_000_000)
    assert np.sum(rho * np.diff(e)) == pytest.approx(1.0, rel=1e-12)
    top2 = set(np.argsort(rho)[-2:])
    assert top2 == {0, 99}
    assert e[0] == pytest.approx(-2.0, abs=1e-9) and e[-1] == pytest.approx(2.0, abs=1e-9)


def test_dos_checkerboard_upper_band_saddle_peak():
    s = spec("checkerboard", 4, omega0=0.0, Jrate=1.0)
    c, rho, _ = density_of_states(s, nbins=100, nk=512, band=1)
    k = int(np.argmax(rho))
    assert 5 < k < 95
    assert rho[k] > 3 * np.median(rho)


def test_dos_zero_hopping_is_single_bin():
    s = spec("chain", 8, Jrate=0.0)
    c, rho, e = density_of_states(s, nbins=50, nk=64)
    assert np.count_nonzero(rho) == 1
    k = np.flatnonzero(rho)[0]
    assert e[k] <= W0 <= e[k + 1]


# --- output -------------------------------------------------------------------------------------


def test_band_csv_layout():
    s = spec("checkerboard", 4)
    buf = io.StringIO()
    write_band_csv(bands(s, nk=8), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "kx,ky,band_index,omega_rad_s,omega_hz"
    assert len(lines) == 1 + 2 * 64
    kx, ky, nu, w, f = lines[1].split(",")
    assert float(w) / (2 * np.pi) == pytest.approx(float(f), rel=1e-11)
    assert "-0," not in buf.getvalue()

    buf = io.StringIO()
    write_band_csv(bands(spec("chain", 8), nk=8), buf)
    assert buf.getvalue().splitlines()[0] == "kx,band_index,omega_rad_s,omega_hz"
