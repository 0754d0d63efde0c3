"""Source waveforms, their moments, and virtual wavelets for zero-mean sources."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

K_MAX = 4
_TRUNC = 1e-12


class UnusableWaveletError(ValueError):
    """No nonzero moment of order <= K_MAX."""


@dataclass(frozen=True, eq=False)
class Wavelet:
    """A sampled source waveform W(s), zero outside its sample window.

    ``is_delta`` marks the ideal impulse; it carries no samples.
    """

    samples: np.ndarray
    start: float = 0.0
    dt: float = 1.0
    is_delta: bool = False
    name: str = "custom"

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        if not self.is_delta:
            if not self.dt > 0:
                raise ValueError("wavelet dt must be positive")
            if samples.size == 0:
                raise ValueError("a sampled wavelet needs at least one sample")
            if not np.all(np.isfinite(samples)):
                raise ValueError("wavelet samples must be finite")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @classmethod
    def delta(cls) -> "Wavelet":
        return cls(np.zeros(0), 0.0, 1.0, is_delta=True, name="delta")

    @property
    def grid(self) -> np.ndarray:
        return self.start + self.dt * np.arange(self.samples.shape[0])

    @property
    def end(self) -> float:
        if self.is_delta:
            return 0.0
        return self.start + self.dt * (self.samples.shape[0] - 1)

    @property
    def support_width(self) -> float:
        return 0.0 if self.is_delta else self.end - self.start

    def __call__(self, s):
        """Linear interpolation of the samples; zero outside the window."""
        if self.is_delta:
            raise TypeError("the delta wavelet cannot be evaluated pointwise")
        return np.interp(s, self.grid, self.samples, left=0.0, right=0.0)

    def reversed(self) -> "Wavelet":
        """W~(s) = W(-s)."""
        if self.is_delta:
            return self
        return Wavelet(self.samples[::-1].copy(), -self.end, self.dt,
                       name=f"{self.name}~")

    def scaled(self, factor: float) -> "Wavelet":
        if self.is_delta:
            raise ValueError("cannot scale the symbolic delta wavelet")
        return Wavelet(factor * self.samples, self.start, self.dt, name=self.name)

    def dilated(self, b: float) -> "Wavelet":
        """The waveform s -> b W(b s); its integral is unchanged."""
        if self.is_delta:
            return self
        return Wavelet(b * self.samples, self.start / b, self.dt / b, name=self.name)

    def __eq__(self, other):
        if not isinstance(other, Wavelet):
            return NotImplemented
        return (self.is_delta == other.is_delta and self.start == other.start
                and self.dt == other.dt
                and np.array_equal(self.samples, other.samples))

    __hash__ = None


def moment(w: Wavelet, k: int) -> float:
    """Trapezoid-rule value of the k-th raw moment, int s**k W(s) ds."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if w.is_delta:
        return 1.0 if k == 0 else 0.0
    s = w.grid
    return float(np.trapezoid(s ** k * w.samples, dx=w.dt))


def first_nonzero_moment(w: Wavelet, tol: float = 1e-8, k_max: int = K_MAX):
    """Smallest k whose moment is distinguishable from zero, with its value.

    The zero test is relative: |m_k| > tol * ||W||_1 * width**k.
    """
    if w.is_delta:
        return 0, 1.0
    l1 = float(np.trapezoid(np.abs(w.samples), dx=w.dt))
    if l1 == 0.0:
        raise UnusableWaveletError("wavelet is identically zero")
    width = max(w.support_width, w.dt)
    for k in range(k_max + 1):
        m = moment(w, k)
        if abs(m) > tol * l1 * width ** k:
            return k, m
    raise UnusableWaveletError(
        f"moments of order 0..{k_max} all vanish; wavelet is unusable")


def virtual_wavelet(w: Wavelet, k: int) -> Wavelet:
    """V(x) = -int_{-inf}^x (s - x)**(k-1)/(k-1)! W(s) ds on the wavelet grid.

    Equivalently (-1)**k times the k-fold antiderivative of W.  The grid is
    padded on the right by one wavelet width and trailing negligible
    samples are trimmed.
    """
    if k < 1:
        raise ValueError(
            "k = 0 means the wavelet is not zero mean; use the refined "
            "transform with w = int W instead")
    if w.is_delta:
        raise ValueError("the delta wavelet has no virtual wavelet")
    pad = w.samples.shape[0]
    y = np.concatenate((w.samples, np.zeros(pad)))
    for _ in range(k):
        y = _kernels.cumtrapz(y, w.dt)
    v = (-1.0) ** k * y
    peak = np.max(np.abs(v))
    nz = np.nonzero(np.abs(v) > _TRUNC * peak)[0] if peak > 0 else np.array([0])
    last = int(nz[-1]) + 1 if nz.size else 1
    return Wavelet(v[:last].copy(), w.start, w.dt, name=f"virtual({w.name},k={k})")


def _gauss(s, center, width, area):
    z = (s - center) / width
    return area / (width * math.sqrt(2.0 * math.pi)) * np.exp(-0.5 * z * z)


BUILTIN_NAMES = ("delta", "gaussian", "dgaussian", "d2gaussian")


def builtin(name: str, center: float = 0.0, width: float = 0.05,
            amplitude: float = 1.0, dt: float | None = None) -> Wavelet:
    """Named waveform: delta, Gaussian of area ``amplitude``, or its derivatives.

    ``dgaussian`` and ``d2gaussian`` are the first and second derivatives of
    that Gaussian, so their first nonzero moments are -amplitude (k=1) and
    2*amplitude (k=2).  Samples are symmetric about ``center`` with spacing
    ``dt`` (default width/20) and trimmed where |W| < 1e-12 max|W|.
    """
    if name == "delta":
        return Wavelet.delta()
    if name not in BUILTIN_NAMES:
        raise ValueError(f"unknown wavelet {name!r}; choose from {BUILTIN_NAMES}")
    if not width > 0:
        raise ValueError("wavelet width must be positive")
    if dt is None:
        dt = width / 20.0
    if not dt > 0:
        raise ValueError("wavelet dt must be positive")
    half = int(math.ceil(10.0 * width / dt))
    s = center + dt * np.arange(-half, half + 1)
    g = _gauss(s, center, width, amplitude)
    z = (s - center) / width
    if name == "gaussian":
        vals = g
    elif name == "dgaussian":
        vals = -z / width * g
    else:
        vals = (z * z - 1.0) / width ** 2 * g
    big = np.nonzero(np.abs(vals) >= _TRUNC * np.max(np.abs(vals)))[0]
    lo, hi = int(big[0]), int(big[-1])
    # keep the window symmetric so moments of symmetric shapes stay exact
    lo = min(lo, len(s) - 1 - hi)
    hi = len(s) - 1 - lo
    return Wavelet(vals[lo:hi + 1].copy(), float(s[lo]), float(dt), name=name)


def from_csv(path) -> Wavelet:
    """Two-column (t, value) CSV with a uniform t grid; header optional."""
    data = np.genfromtxt(path, delimiter=",", comments="#")
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError(f"{path}: expected two columns (t, value)")
    data = data[~np.isnan(data).any(axis=1)]
    t, v = data[:, 0], data[:, 1]
    if t.size < 2:
        raise ValueError(f"{path}: need at least two samples")
    steps = np.diff(t)
    dt = float(np.mean(steps))
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(abs(dt), 1.0):
        raise ValueError(f"{path}: t column must be uniformly increasing")
    return Wavelet(v, float(t[0]), dt, name=str(path))
