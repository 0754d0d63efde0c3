"""Impedance profiles, step-function discretization and reflectivities.

Positions are one-way travel times (seconds); impedance units are arbitrary
but must be positive.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ImpedanceProfile:
    """A positive impedance function, constant outside ``[x_minus, x_plus)``.

    ``evaluator`` is only consulted inside the slab; the constant tails are
    imposed by :meth:`__call__` so evaluators need not handle them.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    x_minus: float
    x_plus: float
    zeta_minus: float
    zeta_plus: float
    name: str = "custom"
    exact_stack: "LayerStack | None" = None

    def __post_init__(self):
        if not 0 < self.x_minus < self.x_plus:
            raise ValueError(
                f"slab must satisfy 0 < x_minus < x_plus, got "
                f"[{self.x_minus}, {self.x_plus}]")
        if self.zeta_minus <= 0 or self.zeta_plus <= 0:
            raise ValueError("end impedances must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = (x >= self.x_minus) & (x < self.x_plus)
        out = np.where(x < self.x_minus, self.zeta_minus, self.zeta_plus)
        out = np.array(out, dtype=np.float64)
        if np.any(inside):
            vals = np.broadcast_to(
                np.asarray(self.evaluator(x[inside]), dtype=np.float64),
                x[inside].shape)
            out[inside] = vals
        return out if out.ndim else float(out)

    def derivative(self, x, h):
        """Symmetric finite difference of the profile, O(h**2)."""
        x = np.asarray(x, dtype=np.float64)
        return (self(x + h) - self(x - h)) / (2.0 * h)


@dataclass(frozen=True, eq=False)
class LayerStack:
    """Step impedance: jump positions plus the n+1 piece values.

    ``values[0]`` holds on ``(-inf, interfaces[0])`` and ``values[j]`` on
    ``[interfaces[j-1], interfaces[j])``.
    """

    interfaces: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.array(self.interfaces, dtype=np.float64).reshape(-1)
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        if vals.shape[0] != xs.shape[0] + 1:
            raise ValueError("need exactly one more value than interfaces")
        if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
            raise ValueError("impedance values must be finite and positive")
        if xs.size and (xs[0] <= 0 or np.any(np.diff(xs) <= 0)):
            raise ValueError("interfaces must be positive and strictly increasing")
        xs.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "interfaces", xs)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_tau_r(cls, tau, r, zeta_minus=1.0):
        """Rebuild a stack from two-way layer times and reflectivities."""
        tau = np.asarray(tau, dtype=np.float64)
        r = np.asarray(r, dtype=np.float64)
        if tau.shape != r.shape:
            raise ValueError("tau and r must have the same length")
        if np.any(np.abs(r) >= 1):
            raise ValueError("reflectivities must satisfy |r| < 1")
        if np.any(tau <= 0):
            raise ValueError("layer times must be positive")
        xs = np.cumsum(tau / 2.0)
        # r = (z0 - z1)/(z0 + z1)  =>  z1 = z0 (1 - r)/(1 + r)
        ratios = (1.0 - r) / (1.0 + r)
        vals = zeta_minus * np.concatenate(([1.0], np.cumprod(ratios)))
        return cls(xs, vals)

    @property
    def n(self) -> int:
        return int(self.interfaces.shape[0])

    @property
    def zeta_minus(self) -> float:
        return float(self.values[0])

    @property
    def zeta_plus(self) -> float:
        return float(self.values[-1])

    @property
    def tau(self) -> np.ndarray:
        return 2.0 * np.diff(self.interfaces, prepend=0.0)

    @property
    def r(self) -> np.ndarray:
        v = self.values
        return (v[:-1] - v[1:]) / (v[:-1] + v[1:])

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        idx = np.searchsorted(self.interfaces, x, side="right")
        out = self.values[idx]
        return out if np.ndim(out) else float(out)

    def scaled(self, a: float, b: float) -> "LayerStack":
        """Stack of x -> a * zeta(b x)."""
        return LayerStack(self.interfaces / b, a * self.values)

    def __eq__(self, other):
        if not isinstance(other, LayerStack):
            return NotImplemented
        return (np.array_equal(self.interfaces, other.interfaces)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        return f"LayerStack(n={self.n}, zeta_minus={self.zeta_minus:g}, zeta_plus={self.zeta_plus:g})"


def to_stack(profile: ImpedanceProfile, max_spacing: float) -> LayerStack:
    """The profile's exact steps when it is piecewise constant, else :func:`discretize`."""
    if profile.exact_stack is not None:
        return profile.exact_stack
    return discretize(profile, max_spacing)


def discretize(profile: ImpedanceProfile, max_spacing: float) -> LayerStack:
    """Midpoint step approximation on the even partition of the slab.

    The partition has the fewest cells whose width does not exceed
    ``max_spacing``.  Jumps sit at cell midpoints; the piece between two
    midpoints takes the profile value at the partition point it contains.
    Jumps of zero height are dropped.
    """
    if not max_spacing > 0:
        raise ValueError("max_spacing must be positive")
    x_lo, x_hi = profile.x_minus, profile.x_plus
    n_cells = max(int(np.ceil((x_hi - x_lo) / max_spacing - 1e-12)), 1)
    nodes = np.linspace(x_lo, x_hi, n_cells + 1)
    vals = np.asarray(profile(nodes), dtype=np.float64)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        bad = nodes[~(np.isfinite(vals) & (vals > 0))][0]
        raise ValueError(f"profile is not positive at x={bad:g}")
    vals[0] = profile.zeta_minus
    vals[-1] = profile.zeta_plus
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    keep = vals[:-1] != vals[1:]
    return LayerStack(mids[keep], np.concatenate(([vals[0]], vals[1:][keep])))


def fd_step(profile: ImpedanceProfile, h=None, spacing=None) -> float:
    """Finite-difference step: explicit ``h``, else spacing/10, else slab/1e4."""
    if h is not None:
        return float(h)
    if spacing is not None:
        return float(spacing) / 10.0
    return (profile.x_plus - profile.x_minus) * 1e-4


def reflectivity_function(profile: ImpedanceProfile, t, h=None, spacing=None,
                          warn_threshold: float = 1e3):
    """Single-scattering reflectivity density -zeta'(t/2) / (4 zeta(t/2)).

    Returns ``(values, flagged)``; ``flagged`` marks points whose finite
    difference exceeds ``warn_threshold`` in magnitude, which happens when
    ``t/2`` sits on (or within ``h`` of) a jump.
    """
    t = np.asarray(t, dtype=np.float64)
    x = t / 2.0
    dz = profile.derivative(x, fd_step(profile, h, spacing))
    vals = -dz / (4.0 * profile(x))
    flagged = np.abs(dz) > warn_threshold
    if np.any(flagged):
        warnings.warn(
            f"{int(np.sum(flagged))} point(s) evaluated at or near a jump",
            RuntimeWarning, stacklevel=2)
    return vals, flagged


def scale_dilate(profile: ImpedanceProfile, a: float, b: float) -> ImpedanceProfile:
    """The profile x -> a * zeta(b x)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    ev = profile.evaluator
    return ImpedanceProfile(
        evaluator=lambda x: a * np.asarray(ev(b * np.asarray(x)), dtype=np.float64),
        x_minus=profile.x_minus / b,
        x_plus=profile.x_plus / b,
        zeta_minus=a * profile.zeta_minus,
        zeta_plus=a * profile.zeta_plus,
        name=f"{profile.name}*scaled(a={a:g},b={b:g})",
        exact_stack=None if profile.exact_stack is None else profile.exact_stack.scaled(a, b),
    )


def stack_profile(stack: LayerStack, name: str = "stack") -> ImpedanceProfile:
    """View a non-empty LayerStack as an ImpedanceProfile."""
    if stack.n == 0:
        raise ValueError("an empty stack has no slab; use a constant profile")
    x_hi = stack.interfaces[-1]
    x_lo = stack.interfaces[0] if stack.n > 1 else x_hi / 2.0
    return ImpedanceProfile(stack.__call__, float(x_lo), float(x_hi),
                            stack.zeta_minus, stack.zeta_plus, name=name)
