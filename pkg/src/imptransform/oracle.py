"""Brute-force ray enumeration for small layered media.

Every bounce path is followed explicitly, its amplitude being the product
of the per-encounter coefficients.  Nothing here shares code with the
lattice or event-queue propagators in :mod:`.forward`; this module exists
to check them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .forward import DeltaTrain
from .media import LayerStack

MAX_INTERFACES = 6
MAX_BOUNCES = 14


@dataclass(frozen=True)
class RayPath:
    """One bounce path: (interface index, arriving direction) per encounter."""

    encounters: tuple
    amplitude: float
    time: float
    crossings: tuple = field(default=(), repr=False)


def _coefficient(r, going_down, reflect):
    if going_down:
        return r if reflect else 1.0 + r
    return -r if reflect else 1.0 - r


def iter_rays(stack: LayerStack, max_bounces: int, t_max: float):
    """Yield every ray with at most ``max_bounces`` reflections, t <= t_max."""
    n = stack.n
    if n == 0:
        return
    x = [float(v) for v in stack.interfaces]
    r = [float(v) for v in stack.r]
    # one-way time of layer j, j=0 is the surface layer [0, x_1)
    thick = [x[0]] + [x[j] - x[j - 1] for j in range(1, n)]
    slack = 1e-12 * max(t_max, 1.0)

    # state: interface hit, going down?, amplitude, bounces, per-layer crossings, path
    start_cross = [0] * n
    start_cross[0] = 1
    stack_ = [(0, True, 1.0, 0, tuple(start_cross), ((0, "down"),))]
    while stack_:
        j, down, amp, bounces, cross, path = stack_.pop()
        for reflect in (False, True):
            nb = bounces + reflect
            if nb > max_bounces:
                continue
            a = amp * _coefficient(r[j], down, reflect)
            if a == 0.0:
                continue
            new_down = down != reflect
            nxt = j + 1 if new_down else j - 1
            if nxt >= n:
                continue  # transmitted into the bottom half-space
            layer = j + 1 if new_down else j
            c = list(cross)
            c[layer] += 1
            t = sum(ci * ti for ci, ti in zip(c, thick))
            if nxt < 0:
                if t <= t_max + slack:
                    yield RayPath(path, a, t, tuple(c))
                continue
            # cheapest way home from interface nxt is straight up
            if t + x[nxt] > t_max + slack:
                continue
            step = (nxt, "down" if new_down else "up")
            stack_.append((nxt, new_down, a, nb, tuple(c), path + (step,)))


def enumerate_rays(stack: LayerStack, max_bounces: int, t_max: float,
                   time_tol: float = 1e-9) -> DeltaTrain:
    """Sum of all rays with <= max_bounces reflections arriving by ``t_max``."""
    if stack.n > MAX_INTERFACES or max_bounces > MAX_BOUNCES:
        raise ValueError(
            f"oracle limited to n <= {MAX_INTERFACES} interfaces and "
            f"<= {MAX_BOUNCES} bounces (got n={stack.n}, bounces={max_bounces})")
    by_crossing = {}
    for ray in iter_rays(stack, max_bounces, t_max):
        by_crossing.setdefault(ray.crossings, [ray.time, []])[1].append(ray.amplitude)
    times = [v[0] for v in by_crossing.values()]
    amps = [math.fsum(v[1]) for v in by_crossing.values()]
    return DeltaTrain.from_events(times, amps, time_tol=time_tol)


def complete_horizon(stack: LayerStack, max_bounces: int) -> float:
    """Time before which an enumeration with ``max_bounces`` misses no arrival.

    A ray with m up-turns spends at least m extra round trips in the
    thinnest internal layer, so rays needing more than ``max_bounces``
    reflections cannot arrive earlier than the returned time.
    """
    tau = stack.tau
    if stack.n <= 1:
        return math.inf
    up_turns = (max_bounces - 1) // 2
    return float(tau[0] + (up_turns + 1) * np.min(tau[1:]))


@dataclass
class Comparison:
    matched: int
    unmatched_a: list
    unmatched_b: list
    max_abs_diff: float
    max_rel_diff: float
    sum_diff: float
    amp_tol: float

    @property
    def ok(self) -> bool:
        return (self.max_rel_diff <= self.amp_tol and not self.unmatched_a
                and not self.unmatched_b)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "matched": self.matched,
            "unmatched_a": self.unmatched_a,
            "unmatched_b": self.unmatched_b,
            "max_abs_diff": self.max_abs_diff,
            "max_rel_diff": self.max_rel_diff,
            "sum_diff": self.sum_diff,
            "amp_tol": self.amp_tol,
        }


def compare(a: DeltaTrain, b: DeltaTrain, time_tol: float = 1e-9,
            amp_tol: float = 1e-12, t_max: float = math.inf) -> Comparison:
    """Match events by time and report amplitude discrepancies.

    Amplitude differences are relative to the largest |amplitude| in either
    train.  An unmatched event counts only if its own relative size exceeds
    ``amp_tol``; only events with t < t_max are considered.
    """
    ta, aa = a.times[a.times < t_max], a.amps[a.times < t_max]
    tb, ab = b.times[b.times < t_max], b.amps[b.times < t_max]
    scale = max(np.max(np.abs(aa), initial=0.0), np.max(np.abs(ab), initial=0.0), 1e-300)
    i = j = matched = 0
    max_abs = 0.0
    un_a, un_b = [], []
    while i < ta.size or j < tb.size:
        if i < ta.size and j < tb.size and abs(ta[i] - tb[j]) <= time_tol:
            max_abs = max(max_abs, abs(aa[i] - ab[j]))
            matched += 1
            i += 1
            j += 1
        elif j >= tb.size or (i < ta.size and ta[i] < tb[j]):
            max_abs = max(max_abs, abs(aa[i]))
            if abs(aa[i]) > amp_tol * scale:
                un_a.append([float(ta[i]), float(aa[i])])
            i += 1
        else:
            max_abs = max(max_abs, abs(ab[j]))
            if abs(ab[j]) > amp_tol * scale:
                un_b.append([float(tb[j]), float(ab[j])])
            j += 1
    return Comparison(matched, un_a, un_b, float(max_abs), float(max_abs / scale),
                      float(math.fsum(aa) - math.fsum(ab)), amp_tol)
