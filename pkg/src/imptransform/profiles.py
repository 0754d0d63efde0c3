"""Profile families, tabulated profiles and the built-in test suite P1-P4."""
from __future__ import annotations

import numpy as np

from .media import ImpedanceProfile, LayerStack


def ramp(x_minus=1.0, x_plus=2.0, zeta_minus=1.0, zeta_plus=2.0, name="ramp"):
    """Linear from zeta_minus at x_minus to zeta_plus at x_plus."""
    slope = (zeta_plus - zeta_minus) / (x_plus - x_minus)
    return ImpedanceProfile(lambda x: zeta_minus + slope * (x - x_minus),
                            x_minus, x_plus, zeta_minus, zeta_plus, name=name)


def gaussian_bump(x_minus=1.0, x_plus=2.0, zeta_minus=1.0, height=1.0,
                  center=None, width=None, name="gaussian-bump"):
    """zeta_minus plus a Gaussian bump; returns to zeta_minus past the slab."""
    center = 0.5 * (x_minus + x_plus) if center is None else center
    width = (x_plus - x_minus) / 8.0 if width is None else width
    return ImpedanceProfile(
        lambda x: zeta_minus + height * np.exp(-0.5 * ((x - center) / width) ** 2),
        x_minus, x_plus, zeta_minus, zeta_minus, name=name)


def blocky(edges, values, zeta_minus=1.0, name="blocky"):
    """Piecewise constant: ``values[i]`` on [edges[i], edges[i+1]).

    ``edges[0]`` and ``edges[-1]`` are the slab ends; the last value holds
    beyond the slab.
    """
    edges = np.asarray(edges, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] != edges.shape[0]:
        raise ValueError("blocky needs one value per edge (last is zeta_plus)")

    def ev(x):
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, values.size - 1)
        return values[idx]

    all_vals = np.concatenate(([zeta_minus], values))
    jumps = all_vals[:-1] != all_vals[1:]
    steps = LayerStack(edges[jumps], np.concatenate(([zeta_minus], values[jumps])))
    return ImpedanceProfile(ev, float(edges[0]), float(edges[-1]), zeta_minus,
                            float(values[-1]), name=name, exact_stack=steps)


def oscillatory(x_minus=1.0, x_plus=2.0, zeta_minus=1.0, zeta_plus=1.5,
                amplitude=0.1, cycles=8, offset=0.0, name="oscillatory"):
    """Trend from zeta_minus to zeta_plus modulated by a square wave.

    Each half period is a thin layer; contrasts are about ``amplitude``.
    ``offset`` shifts the square wave, as a fraction of the slab.
    """
    span = x_plus - x_minus

    def ev(x):
        s = (x - x_minus) / span
        trend = zeta_minus + (zeta_plus - zeta_minus) * s
        phase = np.floor(2.0 * cycles * (s - offset))
        sq = np.where(phase % 2 == 0, 1.0, -1.0)
        return trend * (1.0 + amplitude * sq)

    return ImpedanceProfile(ev, x_minus, x_plus, zeta_minus, zeta_plus, name=name)


def piecewise_constant(x, zeta, zeta_minus, name="table-constant"):
    """Table: ``zeta[i]`` on [x[i], x[i+1]); ``zeta[-1]`` is zeta_plus at x[-1]."""
    return blocky(x, zeta, zeta_minus=zeta_minus, name=name)


def piecewise_linear(x, zeta, zeta_minus=None, name="table-linear"):
    """Table interpolated linearly on [x[0], x[-1]]; constant beyond."""
    x = np.asarray(x, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    if x.shape != zeta.shape or x.size < 2 or np.any(np.diff(x) <= 0):
        raise ValueError("piecewise-linear table needs >= 2 increasing x with matching zeta")
    zm = float(zeta[0]) if zeta_minus is None else zeta_minus
    return ImpedanceProfile(lambda q: np.interp(q, x, zeta), float(x[0]), float(x[-1]),
                            zm, float(zeta[-1]), name=name)


def random_blocky(n_layers=3, seed=0, x_minus=1.0, x_plus=2.0, low=0.2, high=5.0,
                  name=None):
    """Blocky slab with random edges and log-uniform values in [low, high].

    Layer thicknesses vary within a factor of three of each other, so no
    layer is vanishingly thin.
    """
    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.5, 1.5, n_layers)
    edges = x_minus + (x_plus - x_minus) * np.concatenate(([0.0], np.cumsum(weights) / weights.sum()))
    edges[-1] = x_plus
    values = np.exp(rng.uniform(np.log(low), np.log(high), n_layers + 2))
    return blocky(edges, values[1:], zeta_minus=float(values[0]),
                  name=name or f"random{n_layers}(seed={seed})")


def constant(value=1.0, x_minus=1.0, x_plus=2.0, name="constant"):
    return ImpedanceProfile(lambda x: np.full(np.shape(x), float(value)),
                            x_minus, x_plus, value, value, name=name)


# -- built-in suite ---------------------------------------------------------

def p1():
    """Blocky three-layer slab, zeta_+/zeta_- = 4."""
    return blocky([1.0, 1.3, 1.65, 2.0], [2.0, 1.5, 2.6, 4.0], name="P1")


def p2():
    """Smooth rise to about 2.5 and back, ending near zeta_-."""
    def ev(x):
        s = x - 1.0
        return 1.0 + 1.5 * np.sin(np.pi * s) ** 2 + 0.2 * s
    return ImpedanceProfile(ev, 1.0, 2.0, 1.0, 1.2, name="P2")


def p3():
    """Low-contrast thin-layer oscillation on a gentle trend.

    The offset keeps layer boundaries off the partition nodes of the
    default spacing.
    """
    return oscillatory(1.0, 2.0, 1.0, 1.5, amplitude=0.08, cycles=8, offset=0.003,
                       name="P3")


def p4():
    """Smooth ramp, a stiff block, then zeta_+ = 3.

    The jumps sit between partition nodes of the default spacing so that
    rounding in a dilated copy cannot move a node across them.
    """
    def ev(x):
        s = x - 1.0
        return np.where(s < 0.605, 1.0 + s / 0.605,
                        np.where(s < 0.805, 3.6, 3.0))
    return ImpedanceProfile(ev, 1.0, 2.0, 1.0, 3.0, name="P4")


SUITE = {"P1": p1, "P2": p2, "P3": p3, "P4": p4}

FAMILIES = {
    "ramp": ramp,
    "gaussian-bump": gaussian_bump,
    "blocky": blocky,
    "oscillatory": oscillatory,
    "constant": constant,
    "random-blocky": random_blocky,
}


def from_spec(spec) -> ImpedanceProfile:
    """Build a profile from a config entry.

    Accepted forms: ``"P1"``; ``{"name": "P2"}``;
    ``{"family": "ramp", ...kwargs}``;
    ``{"table": "piecewise-constant" | "piecewise-linear", "x": [...],
    "zeta": [...], "zeta_minus": ...}``.
    """
    if isinstance(spec, str):
        spec = {"name": spec}
    spec = dict(spec)
    if "name" in spec:
        name = spec.pop("name")
        if name not in SUITE:
            raise ValueError(f"unknown built-in profile {name!r}; choose from {sorted(SUITE)}")
        return SUITE[name]()
    if "family" in spec:
        fam = spec.pop("family")
        if fam not in FAMILIES:
            raise ValueError(f"unknown profile family {fam!r}; choose from {sorted(FAMILIES)}")
        return FAMILIES[fam](**spec)
    if "table" in spec:
        kind = spec.pop("table")
        if kind == "piecewise-constant":
            return piecewise_constant(spec["x"], spec["zeta"], spec.get("zeta_minus", 1.0))
        if kind == "piecewise-linear":
            return piecewise_linear(spec["x"], spec["zeta"], spec.get("zeta_minus"))
        raise ValueError(f"unknown table kind {kind!r}")
    raise ValueError("profile spec needs 'name', 'family' or 'table'")
