"""Command-line driver.

    matlevy <spectrum|verify|approx|exponent> --config cfg.json --out dir
            [--seed N] [--jobs N] [--check] [--no-figures] [--perturb]

Exit codes: 0 success, 2 configuration error, 3 acceptance-threshold
failure under --check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import ConfigError, ExperimentConfig, check_passed, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matlevy",
        description=(
            "Sample Hermitian matrix Levy paths with rank-one jumps, verify "
            "their covariation representations, and test spectral convergence."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON experiment config")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--check", action="store_true",
                        help="exit 3 when acceptance thresholds fail")
    common.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering")
    sub.add_parser("spectrum", parents=[common],
                   help="ensemble spectra vs the free target law")
    verify = sub.add_parser("verify", parents=[common],
                            help="covariation representation identities")
    verify.add_argument("--perturb", action="store_true",
                        help="inject a defect to demonstrate detection")
    sub.add_parser("approx", parents=[common],
                   help="compound Poisson discretization diagnostics")
    sub.add_parser("exponent", parents=[common],
                   help="characteristic function vs analytic exponent")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config_path = Path(args.config)
    try:
        data = json.loads(config_path.read_text())
    except FileNotFoundError:
        print(f"config error: no such file {config_path}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON in {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not isinstance(data, dict):
        print("config error at '<root>': config must be a JSON object",
              file=sys.stderr)
        return EXIT_CONFIG
    data["kind"] = args.command
    if args.seed is not None:
        data["seed"] = args.seed
    try:
        config = ExperimentConfig.from_json(data)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.out or config.out_dir
    if out_dir is None:
        print("config error at 'out_dir': pass --out or set out_dir",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_experiment(
            config,
            out_dir,
            jobs=max(1, args.jobs),
            perturb=getattr(args, "perturb", False),
            render=not args.no_figures,
        )
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    print(f"{report.command}: wrote {Path(out_dir) / 'report.json'}")
    for key, value in report.aggregates.items():
        if key == "levels":
            for level in value:
                print(f"  n={level['n']}: ks_mean={level['ks_mean']}")
        else:
            print(f"  {key}: {value}")
    print(f"  wall_clock_seconds: {report.wall_clock_seconds:.3f}")
    if args.check:
        ok, message = check_passed(config, report)
        print(f"check: {'pass' if ok else 'FAIL'} - {message}")
        if not ok:
            return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
