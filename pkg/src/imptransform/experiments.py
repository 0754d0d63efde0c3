"""Config-driven experiment pipeline behind the command line tool.

An experiment is a profile, a source wavelet, a recording window and an
optional noise level.  :func:`simulate` writes the synthetic data,
:func:`invert` runs the requested estimators on it, :func:`compare` scores
the estimates against the true profile and :func:`verify` checks the
forward model against the ray oracle and the sum identity.

Output directory layout::

    metadata.json         resolved config, config hash, seed, version
    profile.csv           x, zeta_true, zeta_step
    greens.csv/.json      t, amplitude
    data_clean.csv/.json  t, value   (not written for the delta source)
    data_noisy.csv/.json  t, value   (not written for the delta source)
    estimate_<method>.csv/.json
    overlay.svg
    compare.json
"""
from __future__ import annotations

import copy
import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels, io, oracle, profiles
from ._version import __version__
from .forward import (DeltaTrain, add_noise, antiderivative, convolve,
                      greens_function, make_grid, to_pressure)
from .media import ImpedanceProfile, LayerStack, to_stack
from .svg import LinePlot
from .transforms import (ImpedanceEstimate, classical_estimate, modified_transform,
                         pressure_classical, pressure_refined, refined_transform)
from .wavelets import Wavelet, builtin, first_nonzero_moment, from_csv

log = logging.getLogger("imptransform")

METHODS = ("refined", "classical", "modified", "pressure-refined", "pressure-classical")
MIN_LOBE_SAMPLES = 8
SUM_TOL = 1e-8
ORACLE_TOL = 1e-12
ORACLE_BOUNCES = 12

DEFAULTS = {
    "profile": "P1",
    "discretization": 0.01,
    "wavelet": {"name": "gaussian", "center": 0.0, "width": 0.05, "amplitude": 1.0},
    "noise": {"level": 0.0, "seed": 0},
    "recording": {"t_max": None, "dt": 1e-3, "start": 0.0},
    "methods": ["refined", "classical"],
    "grid_points": 1001,
    "out": "out",
}


class ConfigError(ValueError):
    """The experiment config is invalid; the message says how to fix it."""


def _merge(base, over):
    out = copy.deepcopy(base)
    for key, val in over.items():
        if key not in out:
            raise ConfigError(f"unknown config key {key!r}; known keys: {sorted(out)}")
        if isinstance(out[key], dict) and isinstance(val, dict) and key != "profile":
            unknown = set(val) - set(out[key])
            if unknown and key in ("noise", "recording"):
                raise ConfigError(f"unknown {key} key(s) {sorted(unknown)}")
            out[key] = {**out[key], **val} if key != "wavelet" else dict(val)
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Plain-data experiment description; see :data:`DEFAULTS` for the schema."""

    data: dict

    @classmethod
    def from_dict(cls, d=None) -> "ExperimentConfig":
        return cls(_merge(DEFAULTS, d or {}))

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(raw)

    def override(self, profile=None, wavelet=None, noise=None, seed=None,
                 out=None) -> "ExperimentConfig":
        d = copy.deepcopy(self.data)
        if profile is not None:
            d["profile"] = profile
        if wavelet is not None:
            keep = {k: v for k, v in d["wavelet"].items() if k in ("center", "width", "amplitude")}
            d["wavelet"] = {"name": wavelet, **keep} if wavelet != "delta" else {"name": "delta"}
        if noise is not None:
            d["noise"]["level"] = float(noise)
        if seed is not None:
            d["noise"]["seed"] = int(seed)
        if out is not None:
            d["out"] = str(out)
        return ExperimentConfig(d)

    def __getitem__(self, key):
        return self.data[key]

    @property
    def seed(self) -> int:
        return int(self.data["noise"]["seed"])

    def hash(self) -> str:
        # the output location does not change the experiment
        return io.config_hash({k: v for k, v in self.data.items() if k != "out"})


_RANDOM = re.compile(r"random(\d+)$")


def make_profile(spec, seed: int = 0) -> ImpedanceProfile:
    """Profile from a config entry; ``"random<n>"`` is a seeded random blocky slab."""
    if isinstance(spec, str):
        m = _RANDOM.match(spec)
        if m:
            return profiles.random_blocky(int(m.group(1)), seed=seed)
    try:
        return profiles.from_spec(spec)
    except (TypeError, KeyError, ValueError) as exc:
        raise ConfigError(f"bad profile spec {spec!r}: {exc}") from None


def make_wavelet(spec) -> Wavelet:
    if isinstance(spec, str):
        spec = {"name": spec}
    spec = dict(spec)
    try:
        if "csv" in spec:
            return from_csv(spec["csv"])
        name = spec.pop("name", None)
        if name is None:
            raise ConfigError("wavelet spec needs 'name' or 'csv'")
        return builtin(name, **spec)
    except (TypeError, OSError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad wavelet spec: {exc}") from None


def main_lobe_width(w: Wavelet) -> float:
    """Width of the contiguous region around the peak where |W| >= peak/2."""
    a = np.abs(w.samples)
    i = int(np.argmax(a))
    half = 0.5 * a[i]
    lo = i
    while lo > 0 and a[lo - 1] >= half:
        lo -= 1
    hi = i
    while hi < a.size - 1 and a[hi + 1] >= half:
        hi += 1
    return (hi - lo + 1) * w.dt


def far_side_point(profile: ImpedanceProfile, wavelet: Wavelet) -> float:
    """x_+ plus the wavelet support plus a quarter of the slab."""
    support = 0.0 if wavelet.is_delta else wavelet.support_width
    return profile.x_plus + support + 0.25 * (profile.x_plus - profile.x_minus)


@dataclass(frozen=True, eq=False)
class Experiment:
    """A validated config with everything derived from it."""

    config: ExperimentConfig
    profile: ImpedanceProfile
    stack: LayerStack
    wavelet: Wavelet
    start: float
    dt: float
    t_max: float
    x_eval: float
    grid: np.ndarray

    @property
    def moment(self):
        if self.wavelet.is_delta:
            return 0, 1.0
        return first_nonzero_moment(self.wavelet)


def prepare(config: ExperimentConfig) -> Experiment:
    """Resolve and validate a config."""
    cfg = config.data
    methods = cfg["methods"]
    if isinstance(methods, str):
        methods = [methods]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise ConfigError(f"methods must be a nonempty subset of {list(METHODS)}; got {methods}")
    delta_spacing = float(cfg["discretization"])
    if not delta_spacing > 0:
        raise ConfigError("discretization must be positive")
    profile = make_profile(cfg["profile"], config.seed)
    wavelet = make_wavelet(cfg["wavelet"])
    rec = cfg["recording"]
    dt = float(rec["dt"])
    start = float(rec["start"])
    if not dt > 0:
        raise ConfigError("recording dt must be positive")
    support = 0.0 if wavelet.is_delta else wavelet.support_width
    t_max = rec["t_max"]
    if t_max is None:
        slab = profile.x_plus - profile.x_minus
        t_max = 2.0 * (profile.x_plus + support + slab)
    t_max = float(t_max)
    if not t_max > 2.0 * profile.x_plus:
        raise ConfigError(
            f"recording t_max={t_max:g} must exceed 2*x_+ = {2 * profile.x_plus:g} "
            "so the whole slab is sampled")
    level = float(cfg["noise"]["level"])
    if level < 0:
        raise ConfigError("noise level must be nonnegative")
    if not wavelet.is_delta:
        lobe = main_lobe_width(wavelet)
        if lobe / dt < MIN_LOBE_SAMPLES:
            raise ConfigError(
                f"recording dt={dt:g} puts only {lobe / dt:.1f} samples across the "
                f"wavelet's main lobe (width {lobe:g}); use dt <= {lobe / MIN_LOBE_SAMPLES:g}")
        if not wavelet.end < profile.x_minus:
            raise ConfigError(
                f"wavelet support ends at {wavelet.end:g}, not left of x_- = "
                f"{profile.x_minus:g}; shift the wavelet center or narrow it")
    elif level > 0:
        raise ConfigError("noise needs a sampled recording; choose a non-delta wavelet")
    n_pts = int(cfg["grid_points"])
    if n_pts < 2:
        raise ConfigError("grid_points must be at least 2")
    if wavelet.is_delta:
        t_end = t_max
    else:
        t_end = float(make_grid(start, dt, t_max)[-1])
    grid = np.linspace(0.0, t_end / 2.0, n_pts)
    stack = to_stack(profile, delta_spacing)
    return Experiment(config, profile, stack, wavelet, start, dt, t_max,
                      far_side_point(profile, wavelet), grid)


def forward(exp: Experiment):
    """Green's function, clean data and noisy data (None for the delta source)."""
    reach = 0.0 if exp.wavelet.is_delta else max(exp.wavelet.end, 0.0)
    g = greens_function(exp.stack, exp.t_max + reach) if exp.stack.n else DeltaTrain.empty()
    if exp.wavelet.is_delta:
        return g, None, None
    clean = convolve(g, exp.wavelet, exp.start, exp.dt, exp.t_max)
    noise = exp.config["noise"]
    noisy = add_noise(clean, float(noise["level"]), int(noise["seed"]))
    return g, clean, noisy


def _scale(data, factor):
    if isinstance(data, DeltaTrain):
        return DeltaTrain(data.times, data.amps * factor)
    return data.with_samples(data.samples * factor)


def _retag(est: ImpedanceEstimate, method: str) -> ImpedanceEstimate:
    return ImpedanceEstimate(est.grid, est.values, est.valid, method, est.params)


def run_method(method: str, exp: Experiment, record):
    """Apply one estimator to the recorded data; returns (estimate, notes)."""
    c = exp.profile.zeta_minus
    k, m_k = exp.moment
    grid = exp.grid
    notes = []
    if method in ("refined", "modified", "pressure-refined"):
        if k == 0:
            if method == "modified":
                raise ConfigError(
                    "the modified transform needs a zero-mean wavelet; this one has "
                    f"mean {m_k:g}, request 'refined' instead")
            if method == "refined":
                return refined_transform(record, m_k, c, grid), notes
            return pressure_refined(to_pressure(record), m_k, c, grid), notes
        if method == "refined":
            msg = (f"wavelet {exp.wavelet.name!r} has zero mean (first nonzero moment "
                   f"k={k}); running the modified transform instead of 'refined'")
            log.warning(msg)
            notes.append(msg)
        est = modified_transform(-to_pressure(record) if method == "pressure-refined"
                                 else record, exp.wavelet, c, grid)
        return (_retag(est, method) if method == "pressure-refined" else est), notes
    # classical estimates need deconvolved data: divide by the (effective) area
    if k == 0:
        base, area = record, m_k
    else:
        base, area = antiderivative(record, k), m_k / math.factorial(k)
    if method == "classical":
        return classical_estimate(_scale(base, 1.0 / area), c, grid), notes
    return pressure_classical(_scale(to_pressure(base), 1.0 / area), c, grid), notes


def _provenance(config: ExperimentConfig) -> dict:
    return {"config_hash": config.hash(), "seed": config.seed, "version": __version__}


def _write_profile(out: Path, exp: Experiment):
    x = exp.grid
    step = exp.stack(x) if exp.stack.n else np.full(x.shape, exp.profile.zeta_minus)
    io.write_csv(out / "profile.csv", ["x", "zeta_true", "zeta_step"],
                 [x, exp.profile(x), step])


def simulate(config: ExperimentConfig, out=None) -> dict:
    """Write profile, Green's function, data and metadata; returns the paths."""
    exp = prepare(config)
    out = Path(out if out is not None else config["out"])
    out.mkdir(parents=True, exist_ok=True)
    prov = _provenance(config)
    g, clean, noisy = forward(exp)
    k, m_k = exp.moment
    meta = {
        **prov,
        "config": {k_: v for k_, v in config.data.items() if k_ != "out"},
        "profile_name": exp.profile.name,
        "x_minus": exp.profile.x_minus, "x_plus": exp.profile.x_plus,
        "zeta_minus": exp.profile.zeta_minus, "zeta_plus": exp.profile.zeta_plus,
        "n_interfaces": exp.stack.n,
        "wavelet_name": exp.wavelet.name,
        "wavelet_moment": {"k": k, "m_k": m_k},
        "t_max": exp.t_max,
        "x_eval": exp.x_eval,
        "backend": _kernels.backend(),
    }
    paths = {"metadata": out / "metadata.json", "profile": out / "profile.csv",
             "greens": out / "greens.csv"}
    io.write_json(paths["metadata"], meta)
    _write_profile(out, exp)
    io.write_train(paths["greens"], g, {**prov, "kind": "greens-function",
                                        "n_events": len(g)})
    if clean is not None:
        paths["data_clean"] = out / "data_clean.csv"
        paths["data_noisy"] = out / "data_noisy.csv"
        io.write_trace(paths["data_clean"], clean, {**prov, "kind": "data-clean"})
        io.write_trace(paths["data_noisy"], noisy, {**prov, "kind": "data-noisy"})
    return paths


def _load_record(out: Path, exp: Experiment):
    if exp.wavelet.is_delta:
        return io.read_train(out / "greens.csv")
    return io.read_trace(out / "data_noisy.csv")


def _config_from_out(out: Path) -> ExperimentConfig:
    meta = io.read_json(out / "metadata.json")
    return ExperimentConfig.from_dict({**meta["config"], "out": str(out)})


def invert(config: ExperimentConfig | None = None, out=None) -> dict:
    """Run every requested method on the data in ``out``.

    With a config, data are simulated first unless ``out`` already holds a
    run of the same config.  Without one, the config recorded in
    ``out/metadata.json`` is used.
    """
    if config is None and out is None:
        raise ConfigError("invert needs a config or an output directory with data")
    out = Path(out if out is not None else config["out"])
    meta_path = out / "metadata.json"
    if config is None:
        if not meta_path.exists():
            raise ConfigError(f"{out} holds no simulated data; run simulate first")
        config = _config_from_out(out)
    elif not meta_path.exists() or io.read_json(meta_path).get("config_hash") != config.hash():
        simulate(config, out)
    exp = prepare(config)
    record = _load_record(out, exp)
    prov = _provenance(config)
    estimates = {}
    for method in config["methods"]:
        est, notes = run_method(method, exp, record)
        estimates[method] = est
        io.write_estimate(out / f"estimate_{method}.csv", est,
                          {**prov, "notes": notes, "requested": method})
    overlay(exp, estimates).save(out / "overlay.svg")
    return estimates


_COLORS = {"refined": "blue", "modified": "blue", "classical": "red",
           "pressure-refined": "green", "pressure-classical": "orange"}


def overlay(exp: Experiment, estimates: dict) -> LinePlot:
    x = exp.grid
    plot = LinePlot(title=f"{exp.profile.name}, wavelet {exp.wavelet.name}",
                    xlabel="one-way time x", ylabel="impedance")
    plot.line(x, exp.profile(x), label="true profile", color="black", width=2.0)
    for method, est in estimates.items():
        plot.line(est.grid, est.values, label=est.method if est.method != method
                  else method, color=_COLORS.get(method, "gray"))
    return plot


def metrics(exp: Experiment, est: ImpedanceEstimate) -> dict:
    """Error summary of one estimate against the true profile."""
    truth = exp.profile(est.grid)
    rel = np.abs(est.values - truth) / truth
    inside = est.grid <= exp.profile.x_plus
    finite = np.isfinite(rel)
    far = abs(est.at(exp.x_eval) - exp.profile.zeta_plus) / exp.profile.zeta_plus \
        if est.grid[-1] >= exp.x_eval else float("nan")
    return {
        "method": est.method,
        "median_rel_error_to_x_plus": float(np.median(rel[inside & finite]))
        if np.any(inside & finite) else float("nan"),
        "max_rel_error_to_x_plus": float(np.max(rel[inside & finite]))
        if np.any(inside & finite) else float("nan"),
        "far_side_rel_error": float(far),
        "x_eval": exp.x_eval,
        "invalid_points": int(np.sum(~est.valid)),
    }


def compare(out, config: ExperimentConfig | None = None) -> dict:
    """Score the estimates stored in ``out``; writes compare.json."""
    out = Path(out)
    if config is None:
        if not (out / "metadata.json").exists():
            raise ConfigError(f"{out} holds no experiment; run simulate and invert first")
        config = _config_from_out(out)
    exp = prepare(config)
    report = {**_provenance(config), "profile": exp.profile.name,
              "wavelet": exp.wavelet.name, "methods": {}}
    for method in config["methods"]:
        path = out / f"estimate_{method}.csv"
        if not path.exists():
            raise ConfigError(f"{path} missing; run invert first")
        report["methods"][method] = metrics(exp, io.read_estimate(path))
    io.write_json(out / "compare.json", report)
    return report


def verify(config: ExperimentConfig, corrupt: bool = False) -> dict:
    """Oracle and sum-identity checks on the config's layer stack.

    ``corrupt`` perturbs one computed amplitude as a negative control; both
    checks must then fail.
    """
    exp = prepare(config)
    stack = exp.stack
    report = {**_provenance(config), "profile": exp.profile.name,
              "n_interfaces": stack.n, "backend": _kernels.backend(), "checks": {}}
    if stack.n == 0:
        report["checks"]["sum_identity"] = {"ok": True, "note": "empty stack, no reflections"}
        report["ok"] = True
        return report
    x_n = float(stack.interfaces[-1])
    t_sum = 20.0 * 2.0 * x_n
    g = greens_function(stack, t_sum)
    if corrupt:
        amps = g.amps.copy()
        amps[0] *= 1.0 + 1e-6
        g = DeltaTrain(g.times, amps)
    expected = (stack.zeta_minus - stack.zeta_plus) / (stack.zeta_minus + stack.zeta_plus)
    err = abs(g.total() - expected)
    report["checks"]["sum_identity"] = {
        "ok": bool(err <= SUM_TOL), "t_max": t_sum, "total": g.total(),
        "expected": expected, "abs_error": err, "tol": SUM_TOL}
    if stack.n <= oracle.MAX_INTERFACES:
        horizon = min(oracle.complete_horizon(stack, ORACLE_BOUNCES), t_sum)
        ref = oracle.enumerate_rays(stack, ORACLE_BOUNCES, horizon)
        # an arrival exactly at the horizon may fall either side of it
        cmp = oracle.compare(g, ref, amp_tol=ORACLE_TOL, t_max=horizon * (1 - 1e-12))
        report["checks"]["oracle"] = {**cmp.as_dict(), "horizon": horizon,
                                      "bounces": ORACLE_BOUNCES}
    else:
        report["checks"]["oracle"] = {
            "ok": True, "skipped": f"n={stack.n} exceeds the oracle limit "
                                   f"of {oracle.MAX_INTERFACES} interfaces"}
    report["ok"] = all(c["ok"] for c in report["checks"].values())
    return report


def run(config: ExperimentConfig, out=None) -> dict:
    """simulate, invert and compare in one go."""
    out = Path(out if out is not None else config["out"])
    simulate(config, out)
    invert(config, out)
    return compare(out, config)


def figure_suite(seed: int = 0) -> dict:
    """Named configs reproducing the comparison and noise figures."""
    suite = {}
    for name in profiles.SUITE:
        suite[f"{name}-gaussian"] = {
            "profile": name, "wavelet": {"name": "gaussian", "center": 0.0, "width": 0.05},
            "methods": ["refined", "classical"]}
        suite[f"{name}-dgaussian"] = {
            "profile": name, "wavelet": {"name": "dgaussian", "center": 0.0, "width": 0.05},
            "methods": ["modified", "classical"]}
    # noisy runs need a fine dt: integrated noise grows like sqrt(dt)
    for name in ("P2", "P3"):
        suite[f"{name}-gaussian-noise10"] = {
            "profile": name, "wavelet": {"name": "gaussian", "center": 0.0, "width": 0.05},
            "noise": {"level": 0.10, "seed": seed}, "recording": {"dt": 1e-5},
            "methods": ["refined", "classical"]}
        suite[f"{name}-dgaussian-noise5"] = {
            "profile": name, "wavelet": {"name": "dgaussian", "center": 0.0, "width": 0.05},
            "noise": {"level": 0.05, "seed": seed}, "recording": {"dt": 1e-5},
            "methods": ["modified", "classical"]}
    return suite


def reproduce_figures(out, seed: int = 0) -> dict:
    """Run the figure suite into subdirectories of ``out``; writes index.json."""
    out = Path(out)
    index = {"version": __version__, "seed": seed, "runs": {}}
    for name, cfg in figure_suite(seed).items():
        config = ExperimentConfig.from_dict({**cfg, "out": str(out / name)})
        log.info("running %s", name)
        index["runs"][name] = run(config, out / name)
        exp = prepare(config)
        g = io.read_train(out / name / "greens.csv")
        plot = LinePlot(title=f"Green's function, {exp.profile.name}",
                        xlabel="two-way time t", ylabel="amplitude")
        plot.stems(g.times, g.amps, color="black")
        plot.save(out / name / "greens.svg")
    io.write_json(out / "index.json", index)
    return index
