"""Exact forward modelling for step media.

The reflection Green's function of a step medium is a train of delta
impulses.  It is computed by propagating the impulse through the
interfaces with the velocity scattering rules

* down-going wave hitting interface j from above: reflect ``r_j``,
  transmit ``1 + r_j``;
* up-going wave hitting interface j from below: reflect ``-r_j``,
  transmit ``1 - r_j``.

When all layer thicknesses are integer multiples of a common cell the
propagation runs as a fixed lattice (see :mod:`._kernels`); otherwise an
event queue ordered by arrival time is used.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .media import LayerStack
from .wavelets import Wavelet

PRUNE_TOL = 1e-14
MAX_LATTICE_NODES = 200_000


@dataclass(frozen=True, eq=False)
class DeltaTrain:
    """Sorted impulses sum_i a_i delta(t - t_i), all t_i > 0."""

    times: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=np.float64).reshape(-1)
        a = np.array(self.amps, dtype=np.float64).reshape(-1)
        if t.shape != a.shape:
            raise ValueError("times and amplitudes differ in length")
        if t.size:
            if t[0] <= 0:
                raise ValueError("impulse times must be positive")
            if np.any(np.diff(t) <= 0):
                raise ValueError("impulse times must be strictly increasing")
        t.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "amps", a)

    @classmethod
    def empty(cls) -> "DeltaTrain":
        return cls(np.zeros(0), np.zeros(0))

    @classmethod
    def from_events(cls, times, amps, time_tol: float = 1e-9,
                    prune_abs: float = 0.0) -> "DeltaTrain":
        """Sort, merge arrivals closer than ``time_tol`` and drop tiny ones."""
        times = np.asarray(times, dtype=np.float64).reshape(-1)
        amps = np.asarray(amps, dtype=np.float64).reshape(-1)
        if times.size == 0:
            return cls.empty()
        order = np.argsort(times, kind="stable")
        times, amps = times[order], amps[order]
        new_group = np.concatenate(([True], np.diff(times) > time_tol))
        # chain of close arrivals is anchored at its first time
        starts = np.nonzero(new_group)[0]
        gid = np.cumsum(new_group) - 1
        merged = np.zeros(starts.size)
        np.add.at(merged, gid, amps)
        keep = (merged != 0.0) & (np.abs(merged) >= prune_abs)
        return cls(times[starts][keep], merged[keep])

    def __len__(self):
        return int(self.times.shape[0])

    def total(self) -> float:
        return float(math.fsum(self.amps))

    def __neg__(self):
        return DeltaTrain(self.times, -self.amps)

    def __eq__(self, other):
        if not isinstance(other, DeltaTrain):
            return NotImplemented
        return (np.array_equal(self.times, other.times)
                and np.array_equal(self.amps, other.amps))

    __hash__ = None

    def __repr__(self):
        return f"DeltaTrain({len(self)} events)"


@dataclass(frozen=True, eq=False)
class SampledTrace:
    """Uniform samples of a real signal: value[j] at start + j*dt."""

    samples: np.ndarray
    start: float
    dt: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.float64).reshape(-1)
        if not self.dt > 0:
            raise ValueError("trace dt must be positive")
        if not np.all(np.isfinite(s)):
            raise ValueError("trace samples must be finite")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def grid(self) -> np.ndarray:
        return self.start + self.dt * np.arange(self.samples.shape[0])

    def __len__(self):
        return int(self.samples.shape[0])

    def __neg__(self):
        return SampledTrace(-self.samples, self.start, self.dt, dict(self.meta))

    def with_samples(self, samples, **meta) -> "SampledTrace":
        return SampledTrace(samples, self.start, self.dt, {**self.meta, **meta})

    def __eq__(self, other):
        if not isinstance(other, SampledTrace):
            return NotImplemented
        return (self.start == other.start and self.dt == other.dt
                and np.array_equal(self.samples, other.samples))

    __hash__ = None


def make_grid(start: float, dt: float, t_max: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = int(math.floor((t_max - start) / dt + 1e-9)) + 1
    if n < 1:
        raise ValueError("t_max precedes the grid start")
    return start + dt * np.arange(n)


# ---------------------------------------------------------------------------
# Green's function
# ---------------------------------------------------------------------------

def _common_cell(d, max_denominator=1000, rtol=1e-9):
    """Largest u with every d_j an integer multiple of u, or None."""
    if d.size == 0:
        return None, np.zeros(0, dtype=np.int64)
    base = float(np.min(d))
    denom = 1
    for ratio in d / base:
        frac = Fraction(float(ratio)).limit_denominator(max_denominator)
        if abs(float(frac) - ratio) > rtol * max(ratio, 1.0):
            return None, None
        denom = denom * frac.denominator // math.gcd(denom, frac.denominator)
        if denom > max_denominator:
            return None, None
    u = base / denom
    counts = np.rint(d / u).astype(np.int64)
    if np.any(np.abs(counts * u - d) > rtol * np.maximum(d, 1.0)):
        return None, None
    g = int(np.gcd.reduce(counts))
    return u * g, counts // g


def _check(stack: LayerStack, t_max: float):
    if np.any(np.abs(stack.r) >= 1):
        raise ValueError("all reflectivities must satisfy |r| < 1")
    if stack.n and t_max < 2.0 * stack.interfaces[-1] - 1e-12:
        raise ValueError(
            f"t_max={t_max:g} is shorter than the primary from the last "
            f"interface at t={2.0 * stack.interfaces[-1]:g}")


def greens_function(stack: LayerStack, t_max: float, prune_tol: float = PRUNE_TOL,
                    method: str = "auto") -> DeltaTrain:
    """All arrivals with t <= t_max of the reflection impulse response at x=0.

    ``method`` is ``"lattice"``, ``"events"`` or ``"auto"`` (lattice when the
    layer thicknesses share a common cell of manageable size).
    """
    _check(stack, t_max)
    if stack.n == 0:
        return DeltaTrain.empty()
    x = stack.interfaces
    r = stack.r
    if method not in ("auto", "lattice", "events"):
        raise ValueError(f"unknown method {method!r}")
    if stack.n == 1:
        return DeltaTrain.from_events([2.0 * x[0]], [r[0]])
    if method != "events":
        u, counts = _common_cell(np.diff(x))
        usable = u is not None and int(np.sum(counts)) + 1 <= MAX_LATTICE_NODES
        if usable:
            return _greens_lattice(x, r, u, counts, t_max, prune_tol)
        if method == "lattice":
            raise ValueError("layer thicknesses are not commensurate on a usable cell")
    return _greens_events(x, r, t_max, prune_tol)


def _greens_lattice(x, r, u, counts, t_max, prune_tol):
    offsets = np.concatenate(([0], np.cumsum(counts)))
    refl = np.zeros(int(offsets[-1]) + 1)
    refl[offsets] = r
    t0 = 2.0 * x[0]
    n_steps = int(math.floor((t_max - t0) / u + 1e-9)) + 1
    out = _kernels.lattice_response(refl, n_steps)
    steps = np.nonzero(out)[0]
    amps = out[steps]
    times = t0 + u * steps
    if amps.size:
        keep = np.abs(amps) >= prune_tol * np.max(np.abs(amps))
        times, amps = times[keep], amps[keep]
    return DeltaTrain(times, amps)


_DOWN, _UP = 0, 1


def _greens_events(x, r, t_max, prune_tol):
    n = x.shape[0]
    d = np.diff(x)
    quantum = 1e-10 * max(t_max, 1.0)
    slack = 1e-12 * max(t_max, 1.0)
    heap = []
    pending = {}
    rec_t, rec_a = [], []
    peak = [1.0]

    def push(t, j, direction, amp):
        if amp == 0.0 or abs(amp) < prune_tol * peak[0]:
            return
        if t + x[j] > t_max + slack:
            return
        key = (int(round(t / quantum)), j, direction)
        slot = pending.get(key)
        if slot is None:
            pending[key] = [t, amp]
            heapq.heappush(heap, (t, j, direction, key))
        else:
            slot[1] += amp

    push(x[0], 0, _DOWN, 1.0)
    while heap:
        _, j, direction, key = heapq.heappop(heap)
        t, amp = pending.pop(key)
        if abs(amp) > peak[0]:
            peak[0] = abs(amp)
        rj = r[j]
        if direction == _DOWN:
            up_amp, down_amp = rj * amp, (1.0 + rj) * amp
        else:
            up_amp, down_amp = (1.0 - rj) * amp, -rj * amp
        if j == 0:
            if up_amp != 0.0:
                rec_t.append(t + x[0])
                rec_a.append(up_amp)
        else:
            push(t + d[j - 1], j - 1, _UP, up_amp)
        if j < n - 1:
            push(t + d[j], j + 1, _DOWN, down_amp)

    train = DeltaTrain.from_events(rec_t, rec_a, time_tol=quantum)
    if len(train):
        keep = np.abs(train.amps) >= prune_tol * np.max(np.abs(train.amps))
        train = DeltaTrain(train.times[keep], train.amps[keep])
    return train


def total_reflection(r) -> float:
    """tanh(sum artanh r_j): the integral of the Green's function."""
    r = np.asarray(r, dtype=np.float64).reshape(-1)
    if np.any(np.abs(r) >= 1):
        raise ValueError("all reflectivities must satisfy |r| < 1")
    return float(np.tanh(np.sum(np.arctanh(r))))


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------

def convolve(g: DeltaTrain, w: Wavelet, start: float, dt: float,
             t_max: float) -> SampledTrace:
    """Sample D(t) = sum_i a_i W(t_i - t) on start, start+dt, ..., <= t_max."""
    if w.is_delta:
        raise ValueError(
            "convolution with the delta wavelet is the Green's function "
            "itself; use the DeltaTrain directly")
    grid = make_grid(start, dt, t_max)
    samples = _kernels.convolve_events(
        g.times, g.amps, np.ascontiguousarray(w.samples), float(w.start),
        float(w.dt), float(start), float(dt), grid.shape[0])
    return SampledTrace(samples, start, dt, {"wavelet": w.name})


def add_noise(trace: SampledTrace, level: float, seed: int) -> SampledTrace:
    """Add iid N(0, (level * max|trace|)**2) samples, reproducible from ``seed``."""
    if level < 0:
        raise ValueError("noise level must be nonnegative")
    meta = {"noise_level": level, "noise_seed": seed,
            "noise_convention": "std = level * peak |clean trace|"}
    if level == 0:
        return trace.with_samples(trace.samples.copy(), **meta)
    sigma = level * float(np.max(np.abs(trace.samples))) if len(trace) else 0.0
    rng = np.random.default_rng(seed)
    noise = sigma * rng.standard_normal(len(trace))
    return trace.with_samples(trace.samples + noise, **meta)


def to_pressure(g):
    """Green's function (or data) of the pressure equation for the same medium."""
    return -g


def antiderivative(data, k: int, grid=None) -> SampledTrace:
    """k-fold antiderivative int_{-inf}^t (t-s)**(k-1)/(k-1)! D(s) ds.

    Sampled traces are integrated by repeated cumulative trapezoid from the
    trace start (the trace is assumed to vanish before it).  Delta trains
    are evaluated exactly on ``grid`` (a :class:`SampledTrace` whose grid is
    reused, or a ``(start, dt, t_max)`` tuple).
    """
    if k < 1:
        raise ValueError("k must be >= 1; k = 0 is the data itself")
    if isinstance(data, SampledTrace):
        y = data.samples
        for _ in range(k):
            y = _kernels.cumtrapz(np.ascontiguousarray(y), data.dt)
        return data.with_samples(y, antiderivative_order=k)
    if not isinstance(data, DeltaTrain):
        raise TypeError("expected a SampledTrace or a DeltaTrain")
    if grid is None:
        raise ValueError("a grid is required to sample a delta train")
    if isinstance(grid, SampledTrace):
        start, dt, t = grid.start, grid.dt, grid.grid
    else:
        start, dt, t_max = grid
        t = make_grid(start, dt, t_max)
    out = np.zeros(t.shape[0])
    if len(data):
        chunk = max(1, 2_000_000 // len(data))
        for lo in range(0, t.shape[0], chunk):
            lag = t[lo:lo + chunk, None] - data.times[None, :]
            basis = np.where(lag >= 0, np.maximum(lag, 0.0) ** (k - 1), 0.0)
            out[lo:lo + chunk] = basis @ data.amps
        out /= math.factorial(k - 1)
    return SampledTrace(out, start, dt, {"antiderivative_order": k})
