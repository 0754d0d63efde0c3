"""Hot loops, each with a numba implementation and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``IMPTRANSFORM_DISABLE_NUMBA`` is unset (or set to ``0``).  Both
implementations are always importable under explicit names so the
benchmark and the kernel tests can compare them in one process.
"""
import os

import numpy as np

_DISABLE = os.environ.get("IMPTRANSFORM_DISABLE_NUMBA", "0").strip().lower()

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _DISABLE in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# Lattice time stepping
# ---------------------------------------------------------------------------

def lattice_response_numpy(refl, n_steps):
    """Up-going amplitude leaving node 0 at each one-way time step.

    ``refl[k]`` is the reflectivity at lattice node k (0 for pass-through
    nodes).  Nodes are one cell apart in one-way time; a unit down-going
    impulse arrives at node 0 at step 0.
    """
    refl = np.asarray(refl, dtype=np.float64)
    n_nodes = refl.shape[0]
    out = np.zeros(n_steps, dtype=np.float64)
    down = np.zeros(n_nodes)
    up = np.zeros(n_nodes)
    down[0] = 1.0
    plus = 1.0 + refl
    minus = 1.0 - refl
    for s in range(n_steps):
        d_out = plus * down - refl * up
        u_out = refl * down + minus * up
        out[s] = u_out[0]
        down[1:] = d_out[:-1]
        down[0] = 0.0
        up[:-1] = u_out[1:]
        up[-1] = 0.0
    return out


def convolve_events_numpy(times, amps, w_samples, w_start, w_dt, t0, dt, n):
    """Sample sum_i a_i W(t_i - t) on the grid t0 + j*dt, j < n.

    W is linearly interpolated between its samples and zero outside them.
    """
    out = np.zeros(n, dtype=np.float64)
    m = w_samples.shape[0]
    w_end = w_start + (m - 1) * w_dt
    s_grid = w_start + w_dt * np.arange(m)
    for t_i, a_i in zip(times, amps):
        # W(t_i - t) nonzero for t in [t_i - w_end, t_i - w_start]
        j_lo = max(int(np.ceil((t_i - w_end - t0) / dt)), 0)
        j_hi = min(int(np.floor((t_i - w_start - t0) / dt)), n - 1)
        if j_hi < j_lo:
            continue
        t = t0 + dt * np.arange(j_lo, j_hi + 1)
        out[j_lo:j_hi + 1] += a_i * np.interp(t_i - t, s_grid, w_samples,
                                              left=0.0, right=0.0)
    return out


def cumtrapz_numpy(y, dx):
    """Cumulative trapezoid with a leading zero (same length as ``y``)."""
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros_like(y)
    if y.shape[0] > 1:
        out[1:] = np.cumsum(0.5 * dx * (y[1:] + y[:-1]))
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def lattice_response_numba(refl, n_steps):
        n_nodes = refl.shape[0]
        out = np.zeros(n_steps)
        down = np.zeros(n_nodes)
        up = np.zeros(n_nodes)
        d_out = np.zeros(n_nodes)
        u_out = np.zeros(n_nodes)
        down[0] = 1.0
        for s in range(n_steps):
            for k in range(n_nodes):
                r = refl[k]
                d_out[k] = (1.0 + r) * down[k] - r * up[k]
                u_out[k] = r * down[k] + (1.0 - r) * up[k]
            out[s] = u_out[0]
            for k in range(n_nodes - 1, 0, -1):
                down[k] = d_out[k - 1]
            down[0] = 0.0
            for k in range(n_nodes - 1):
                up[k] = u_out[k + 1]
            up[n_nodes - 1] = 0.0
        return out

    @njit(cache=True)
    def convolve_events_numba(times, amps, w_samples, w_start, w_dt, t0, dt, n):
        out = np.zeros(n)
        m = w_samples.shape[0]
        w_end = w_start + (m - 1) * w_dt
        for i in range(times.shape[0]):
            t_i = times[i]
            a_i = amps[i]
            j_lo = int(np.ceil((t_i - w_end - t0) / dt))
            j_hi = int(np.floor((t_i - w_start - t0) / dt))
            if j_lo < 0:
                j_lo = 0
            if j_hi > n - 1:
                j_hi = n - 1
            for j in range(j_lo, j_hi + 1):
                s = t_i - (t0 + dt * j)
                pos = (s - w_start) / w_dt
                q = int(np.floor(pos))
                if q < 0 or q > m - 1:
                    continue
                if q == m - 1:
                    val = w_samples[m - 1] if pos == m - 1 else 0.0
                else:
                    frac = pos - q
                    val = w_samples[q] + frac * (w_samples[q + 1] - w_samples[q])
                out[j] += a_i * val
        return out

    @njit(cache=True)
    def cumtrapz_numba(y, dx):
        out = np.zeros(y.shape[0])
        acc = 0.0
        for i in range(1, y.shape[0]):
            acc += 0.5 * dx * (y[i] + y[i - 1])
            out[i] = acc
        return out

else:  # pragma: no cover
    lattice_response_numba = lattice_response_numpy
    convolve_events_numba = convolve_events_numpy
    cumtrapz_numba = cumtrapz_numpy


if USE_NUMBA:
    lattice_response = lattice_response_numba
    convolve_events = convolve_events_numba
    cumtrapz = cumtrapz_numba
else:
    lattice_response = lattice_response_numpy
    convolve_events = convolve_events_numpy
    cumtrapz = cumtrapz_numpy


def backend():
    return "numba" if USE_NUMBA else "numpy"
