"""CSV and JSON-sidecar serialization.

Column layouts:

* delta train      ``t,amplitude``
* sampled trace    ``t,value``            + ``<name>.json`` (dt, start, ...)
* estimate         ``x,zeta_estimate,valid_flag`` + ``<name>.json``
* profile          ``x,zeta_true,zeta_step``

Floats are written with 17 significant digits so files round-trip exactly
and identical inputs give byte-identical files.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .forward import DeltaTrain, SampledTrace
from .transforms import ImpedanceEstimate


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    v = float(v)
    if np.isnan(v):
        return "nan"
    return format(v, ".17g")


def write_csv(path, header, columns):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [np.asarray(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Return (header, 2-D float array) of a CSV written by :func:`write_csv`."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
        body = fh.read()
    if not body.strip():
        return header, np.zeros((0, len(header)))
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=_json_default).encode()
    return hashlib.sha256(blob).hexdigest()


def write_train(path, g: DeltaTrain, meta=None):
    write_csv(path, ["t", "amplitude"], [g.times, g.amps])
    if meta is not None:
        write_json(Path(path).with_suffix(".json"), meta)


def read_train(path) -> DeltaTrain:
    _, data = read_csv(path)
    return DeltaTrain(data[:, 0], data[:, 1])


def write_trace(path, tr: SampledTrace, meta=None):
    write_csv(path, ["t", "value"], [tr.grid, tr.samples])
    write_json(Path(path).with_suffix(".json"),
               {"dt": tr.dt, "start": tr.start, **tr.meta, **(meta or {})})


def read_trace(path) -> SampledTrace:
    _, data = read_csv(path)
    side = Path(path).with_suffix(".json")
    if side.exists():
        meta = read_json(side)
        dt, start = float(meta.pop("dt")), float(meta.pop("start"))
    else:
        meta = {}
        dt, start = float(data[1, 0] - data[0, 0]), float(data[0, 0])
    return SampledTrace(data[:, 1], start, dt, meta)


def write_estimate(path, est: ImpedanceEstimate, meta=None):
    write_csv(path, ["x", "zeta_estimate", "valid_flag"],
              [est.grid, est.values, est.valid])
    write_json(Path(path).with_suffix(".json"),
               {"method": est.method, "params": est.params, **(meta or {})})


def read_estimate(path) -> ImpedanceEstimate:
    _, data = read_csv(path)
    side = read_json(Path(path).with_suffix(".json"))
    return ImpedanceEstimate(data[:, 0], data[:, 1], data[:, 2].astype(bool),
                             side["method"], side.get("params", {}))
