import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from imptransform import (UnusableWaveletError, Wavelet, builtin, first_nonzero_moment,
                          moment, virtual_wavelet)
from imptransform.wavelets import from_csv


@pytest.mark.parametrize("name,k,value", [
    ("gaussian", 0, 1.0), ("dgaussian", 1, -1.0), ("d2gaussian", 2, 2.0)])
def test_builtin_first_nonzero_moments(name, k, value):
    got_k, got = first_nonzero_moment(builtin(name))
    assert got_k == k
    assert got == pytest.approx(value, rel=1e-9)


def test_delta_moments():
    d = Wavelet.delta()
    assert first_nonzero_moment(d) == (0, 1.0)
    assert moment(d, 0) == 1.0 and moment(d, 3) == 0.0


def test_zero_wavelet_is_unusable():
    with pytest.raises(UnusableWaveletError):
        first_nonzero_moment(Wavelet(np.zeros(10), 0.0, 0.1))


def test_wavelet_with_vanishing_low_moments_is_unusable():
    # fifth derivative of a Gaussian: moments of order 0..4 vanish
    z = np.linspace(-10, 10, 4001)
    he5 = z ** 5 - 10 * z ** 3 + 15 * z
    w = Wavelet(-he5 * np.exp(-0.5 * z * z), -10.0, z[1] - z[0])
    with pytest.raises(UnusableWaveletError):
        first_nonzero_moment(w)
    assert first_nonzero_moment(w, k_max=5)[0] == 5


def test_gaussian_area_and_amplitude():
    w = builtin("gaussian", center=-0.2, width=0.03, amplitude=2.5)
    assert moment(w, 0) == pytest.approx(2.5, rel=1e-10)
    assert w.grid[np.argmax(w.samples)] == pytest.approx(-0.2)


@pytest.mark.parametrize("name", ["dgaussian", "d2gaussian"])
def test_virtual_wavelet_integral_is_scaled_moment(name):
    w = builtin(name)
    k, m_k = first_nonzero_moment(w)
    v = virtual_wavelet(w, k)
    assert np.trapezoid(v.samples, dx=v.dt) == pytest.approx(m_k / math.factorial(k), rel=1e-9)


def test_virtual_wavelet_rejects_bad_order():
    with pytest.raises(ValueError):
        virtual_wavelet(builtin("dgaussian"), 0)
    with pytest.raises(ValueError):
        virtual_wavelet(Wavelet.delta(), 1)


@given(st.floats(0.25, 4.0), st.integers(0, 3))
def test_dilation_rescales_moments(b, k):
    w = builtin("d2gaussian", center=0.1, width=0.04)
    assert moment(w.dilated(b), k) == pytest.approx(moment(w, k) / b ** k, rel=1e-9, abs=1e-12)


def test_reversal_and_interpolation():
    w = Wavelet(np.array([0.0, 1.0, 3.0]), 0.5, 0.5)
    r = w.reversed()
    assert r.start == -1.5
    assert r(-1.0) == pytest.approx(1.0)
    assert w(0.75) == pytest.approx(0.5)
    assert w(5.0) == 0.0


def test_unknown_builtin():
    with pytest.raises(ValueError, match="unknown wavelet"):
        builtin("ricker")


def test_csv_roundtrip(tmp_path):
    w = builtin("dgaussian", width=0.1)
    p = tmp_path / "w.csv"
    np.savetxt(p, np.column_stack([w.grid, w.samples]), delimiter=",", header="t,value")
    back = from_csv(p)
    assert back.dt == pytest.approx(w.dt)
    np.testing.assert_allclose(back.samples, w.samples, rtol=1e-15)


def test_csv_rejects_uneven_grid(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("0,1\n0.1,2\n0.3,1\n")
    with pytest.raises(ValueError, match="uniform"):
        from_csv(p)
