import os
import subprocess
import sys

import numpy as np
import pytest

from imptransform import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def test_lattice_kernels_agree():
    rng = np.random.default_rng(0)
    refl = rng.uniform(-0.6, 0.6, 40)
    refl[rng.random(40) < 0.3] = 0.0
    a = _kernels.lattice_response_numpy(refl, 500)
    b = _kernels.lattice_response_numba(refl, 500)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_convolution_kernels_agree():
    rng = np.random.default_rng(1)
    times = np.sort(rng.uniform(1, 5, 60))
    amps = rng.normal(size=60)
    w = np.exp(-np.linspace(-4, 4, 81) ** 2)
    args = (times, amps, w, -0.2, 0.005, 0.0, 0.003, 2000)
    np.testing.assert_allclose(_kernels.convolve_events_numpy(*args),
                               _kernels.convolve_events_numba(*args), rtol=0, atol=1e-14)


def test_cumtrapz_kernels_agree():
    y = np.random.default_rng(2).normal(size=1001)
    a = _kernels.cumtrapz_numpy(y, 0.01)
    b = _kernels.cumtrapz_numba(y, 0.01)
    assert a[0] == 0.0
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_environment_flag_selects_numpy():
    env = {**os.environ, "IMPTRANSFORM_DISABLE_NUMBA": "1"}
    out = subprocess.run([sys.executable, "-c",
                          "from imptransform import _kernels; print(_kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
