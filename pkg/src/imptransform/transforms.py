"""Impedance recovery from reflection data.

All estimators are functions of the accumulation curve
``A(x) = int_{-inf}^{2x} g(t) dt``:

* refined transform      c (w - A) / (w + A)
* classical estimate     c exp(-2 A)
* pressure counterparts  obtained by negating the data.

The zero-mean variant integrates the data k times and uses the k-th moment
of the source (divided by k!) as the effective wavelet area.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .forward import DeltaTrain, SampledTrace, antiderivative
from .media import ImpedanceProfile, fd_step
from .wavelets import Wavelet, first_nonzero_moment

METHODS = ("refined", "classical", "refined-zero-mean",
           "pressure-refined", "pressure-classical")


@dataclass(frozen=True, eq=False)
class AccumulationCurve:
    grid: np.ndarray
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class ImpedanceEstimate:
    """Estimated impedance on a grid of one-way times.

    ``valid`` is False where the refined denominator vanished; ``values``
    holds NaN there.
    """

    grid: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def at(self, x):
        """Value at the last grid point <= x."""
        i = int(np.searchsorted(self.grid, x, side="right")) - 1
        if i < 0:
            raise ValueError(f"x={x} precedes the estimate grid")
        return float(self.values[i])


def default_grid(g, n_tail: int = 1) -> np.ndarray:
    """Evaluation positions matched to the data.

    Delta trains: one point between each pair of consecutive event
    half-times, plus points before the first and after the last event.
    Sampled traces: half the trace times.
    """
    if isinstance(g, SampledTrace):
        return g.grid / 2.0
    if not isinstance(g, DeltaTrain):
        raise TypeError("expected a DeltaTrain or a SampledTrace")
    if len(g) == 0:
        return np.array([0.0])
    h = g.times / 2.0
    gap = np.min(np.diff(h)) if len(g) > 1 else h[0]
    mids = 0.5 * (h[:-1] + h[1:])
    tail = h[-1] + gap * np.arange(1, n_tail + 1) / (n_tail + 1)
    return np.concatenate(([h[0] / 2.0], mids, tail))


def accumulate(g, grid) -> AccumulationCurve:
    """A(x) = integral of g up to t = 2x.

    Delta trains include impulses sitting exactly at t = 2x.  Sampled traces
    use the cumulative trapezoid from the trace start with linear
    interpolation at 2x (zero before the start, held after the end).
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    t = 2.0 * grid
    if isinstance(g, DeltaTrain):
        csum = np.concatenate(([0.0], np.cumsum(g.amps)))
        idx = np.searchsorted(g.times, t, side="right")
        vals = csum[idx]
    elif isinstance(g, SampledTrace):
        cum = _kernels.cumtrapz(np.ascontiguousarray(g.samples), g.dt)
        vals = np.interp(t, g.grid, cum, left=0.0, right=cum[-1] if cum.size else 0.0)
    else:
        raise TypeError("expected a DeltaTrain or a SampledTrace")
    return AccumulationCurve(grid, vals)


def _refined(acc: AccumulationCurve, w: float, c: float, method: str, params: dict):
    denom = w + acc.values
    valid = denom != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(valid, c * (w - acc.values) / np.where(valid, denom, 1.0), np.nan)
    return ImpedanceEstimate(acc.grid, vals, valid, method, params)


def _check_c(c):
    if not c > 0:
        raise ValueError("reference impedance c must be positive")


def refined_transform(g, w: float, c: float, grid=None) -> ImpedanceEstimate:
    """c (w - A(x)) / (w + A(x)); samples with w + A = 0 are flagged invalid."""
    if w == 0:
        raise ValueError(
            "w = 0: the source is zero mean; use modified_transform instead")
    _check_c(c)
    grid = default_grid(g) if grid is None else grid
    return _refined(accumulate(g, grid), w, c, "refined", {"w": w, "c": c})


def classical_estimate(g, c: float, grid=None) -> ImpedanceEstimate:
    """c exp(-2 A(x)); meant for impulse responses or deconvolved data."""
    _check_c(c)
    grid = default_grid(g) if grid is None else grid
    acc = accumulate(g, grid)
    vals = c * np.exp(-2.0 * acc.values)
    return ImpedanceEstimate(acc.grid, vals, np.ones(vals.shape, bool),
                             "classical", {"c": c})


def modified_transform(d: SampledTrace, w_source: Wavelet, c: float, grid=None,
                       tol: float = 1e-8) -> ImpedanceEstimate:
    """Refined transform of the k-fold antiderivative, with w = m_k / k!."""
    _check_c(c)
    k, m_k = first_nonzero_moment(w_source, tol=tol)
    if k == 0:
        raise ValueError(
            f"source has nonzero mean ({m_k:g}); use refined_transform with w = {m_k:g}")
    v = m_k / math.factorial(k)
    dk = antiderivative(d, k)
    grid = default_grid(d) if grid is None else grid
    return _refined(accumulate(dk, grid), v, c, "refined-zero-mean",
                    {"v": v, "c": c, "k": k})


def pressure_refined(f, w: float, c: float, grid=None) -> ImpedanceEstimate:
    """Refined transform for pressure data: the velocity transform of -f."""
    est = refined_transform(-f, w, c, grid)
    return ImpedanceEstimate(est.grid, est.values, est.valid, "pressure-refined", est.params)


def pressure_classical(f, c: float, grid=None) -> ImpedanceEstimate:
    """c exp(+2 A_f(x))."""
    est = classical_estimate(-f, c, grid)
    return ImpedanceEstimate(est.grid, est.values, est.valid, "pressure-classical", est.params)


def energy_lag(profile, g: DeltaTrain, grid) -> np.ndarray:
    """|(z_- - z(x)) / (z_- + z(x)) - A(x)| on the grid.

    ``profile`` is anything callable on positions with a ``zeta_minus``
    attribute (an ImpedanceProfile or a LayerStack).
    """
    grid = np.asarray(grid, dtype=np.float64)
    z = np.asarray(profile(grid), dtype=np.float64)
    zm = profile.zeta_minus
    return np.abs((zm - z) / (zm + z) - accumulate(g, grid).values)


def greens_approximations(profile: ImpedanceProfile, t, h=None, spacing=None,
                          warn_threshold: float = 1e3):
    """Single-scattering and refined pointwise approximations to G(t).

    Returns ``(single, refined, flagged)`` where

    * single  = -z'(t/2) / (4 z(t/2))
    * refined = -z_- z'(t/2) / (z_- + z(t/2))**2
    """
    t = np.asarray(t, dtype=np.float64)
    x = t / 2.0
    dz = profile.derivative(x, fd_step(profile, h, spacing))
    z = np.asarray(profile(x), dtype=np.float64)
    zm = profile.zeta_minus
    single = -dz / (4.0 * z)
    refined = -zm * dz / (zm + z) ** 2
    flagged = np.abs(dz) > warn_threshold
    return single, refined, flagged
