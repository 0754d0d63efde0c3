"""Command line entry point: ``imptransform <subcommand> [options]``.

Exit status is 0 on success, 1 when the config or inputs are invalid and
2 when a verification check fails.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments
from ._version import __version__
from .experiments import ConfigError, ExperimentConfig
from .wavelets import UnusableWaveletError

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="noise / random-profile seed")
    common.add_argument("--profile", help="built-in profile (P1..P4) or random<n>")
    common.add_argument("--wavelet", help="built-in wavelet name")
    common.add_argument("--noise", type=float, help="noise level as a fraction of peak |data|")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="imptransform",
                                description="Layered-medium reflection simulator and "
                                            "impedance recovery experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="write synthetic data")
    sub.add_parser("invert", parents=[common], help="estimate impedance from data")
    sub.add_parser("compare", parents=[common], help="score estimates against the truth")
    v = sub.add_parser("verify", parents=[common],
                       help="check the forward model against the ray oracle")
    v.add_argument("--corrupt", action="store_true",
                   help="perturb one amplitude (negative control; must fail)")
    sub.add_parser("reproduce-figures", parents=[common], help="run the figure suite")
    return p


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig.from_dict()
    return cfg.override(profile=args.profile, wavelet=args.wavelet, noise=args.noise,
                        seed=args.seed, out=args.out)


def _dump(obj):
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "compare" and args.config is None and args.out is not None:
            _dump(experiments.compare(args.out))
            return EXIT_OK
        if args.command == "invert" and args.config is None and args.out is not None \
                and (args.out / "metadata.json").exists():
            est = experiments.invert(out=args.out)
            print(f"wrote {len(est)} estimate(s) to {args.out}")
            return EXIT_OK
        cfg = _config(args)
        if args.command == "simulate":
            paths = experiments.simulate(cfg)
            print("\n".join(str(p) for p in paths.values()))
        elif args.command == "invert":
            est = experiments.invert(cfg)
            print(f"wrote {len(est)} estimate(s) to {cfg['out']}")
        elif args.command == "compare":
            _dump(experiments.compare(cfg["out"], cfg))
        elif args.command == "verify":
            report = experiments.verify(cfg, corrupt=args.corrupt)
            if args.out is not None:
                from .io import write_json
                write_json(Path(args.out) / "verify.json", report)
            _dump(report)
            return EXIT_OK if report["ok"] else EXIT_VERIFY
        else:
            index = experiments.reproduce_figures(cfg["out"], seed=cfg.seed)
            print(f"wrote {len(index['runs'])} runs to {cfg['out']}")
    except (ConfigError, UnusableWaveletError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
