import numpy as np
import pytest
from hypothesis import given, strategies as st

from hml.errors import PhysicsDomainError
from hml.units import HBAR, MU0, Constants, FieldBias, MaterialParams, magnet_moment, material_from_name, yig_preset


def test_constants():
    assert MU0 == 4e-7 * np.pi
    assert HBAR == 1.054571817e-34
    c = Constants()
    assert (c.mu0, c.hbar) == (MU0, HBAR)


def test_yig_preset_values(yig):
    assert yig.Ms == 196e3
    assert yig.ka == 2480
    assert yig.gamma0 == 1.76199e11
    assert yig.gammaq == 1.76149e11
    assert yig.DeltaNV == pytest.approx(2 * np.pi * 2.87e9, rel=1e-15)
    assert yig.gamma0 - yig.gammaq == pytest.approx(5.0e7, rel=1e-9)


def test_preset_lookup():
    assert material_from_name("YIG") == yig_preset()
    with pytest.raises(KeyError):
        material_from_name("permalloy")


@pytest.mark.parametrize("field", ["gamma0", "gammaq", "Ms", "ka", "DeltaNV"])
def test_material_rejects_nonpositive(field):
    kw = dict(gamma0=1.0, gammaq=1.0, Ms=1.0, ka=1.0, DeltaNV=1.0)
    kw[field] = 0.0
    with pytest.raises(PhysicsDomainError):
        MaterialParams(**kw)


def test_field_bias():
    assert FieldBias(0.0).B0 == 0.0
    with pytest.raises(PhysicsDomainError):
        FieldBias(-1e-3)
    assert FieldBias(0.07).larmor(yig_preset()) == pytest.approx(1.76199e11 * 0.07)


def test_moment_one_micron(yig):
    mu, F = magnet_moment(1e-6, yig)
    # independent evaluation: 196e3 * 4.18879e-18
    assert mu == pytest.approx(8.21e-13, rel=2e-3)
    assert F == pytest.approx(mu / (1.054571817e-34 * 1.76199e11), rel=1e-14)


def test_moment_fig4_magnet(yig):
    _, F = magnet_moment(350e-9, yig)
    assert F == pytest.approx(1.89e9, rel=5e-3)


def test_moment_rejects_nonpositive(yig):
    for R in (0.0, -1e-9):
        with pytest.raises(PhysicsDomainError):
            magnet_moment(R, yig)


def test_moment_vanishes_with_radius(yig):
    ratio = magnet_moment(1e-12, yig)[1] / magnet_moment(1e-6, yig)[1]
    assert ratio == pytest.approx(1e-18, rel=1e-9)


@given(st.floats(min_value=1e-9, max_value=1e-4))
def test_moment_scales_as_cube(R):
    mat = yig_preset()
    F1 = magnet_moment(R, mat)[1]
    F2 = magnet_moment(2 * R, mat)[1]
    assert F2 == pytest.approx(8 * F1, rel=1e-12)
    assert np.isfinite(F1) and F1 > 0
