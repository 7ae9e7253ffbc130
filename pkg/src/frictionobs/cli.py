"""Command-line interface.

    frictionobs simulate --config scenario.json [--out runs/exp1]
    frictionobs sweep --configs 'configs/*.json' [--jobs 4]
    frictionobs check-pe --config scenario.json
    frictionobs version

Exit codes: 0 success, 2 configuration error, 3 numerical blow-up,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .exceptions import BlowUpError, ConfigurationError
from .runner import load_config, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_IO = 4


def _error(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _run_one(config_path: str, out_dir: str | None = None) -> dict:
    cfg = load_config(config_path)
    summary = run_experiment(cfg, out_dir=out_dir)
    return summary.to_dict()


def _cmd_simulate(args) -> int:
    summary = _run_one(args.config, args.out)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    paths = sorted(glob.glob(args.configs))
    if not paths:
        raise ConfigurationError(f"no config files match '{args.configs}'")
    failures = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {path: pool.submit(_run_one, path) for path in paths}
            for path, future in futures.items():
                try:
                    summary = future.result()
                    print(f"[sweep] {path} -> {summary['output_dir']}")
                except Exception as exc:  # reported per run, sweep continues
                    failures.append((path, exc))
                    print(f"[sweep] {path} FAILED: {exc}", file=sys.stderr)
    else:
        for path in paths:
            try:
                summary = _run_one(path)
                print(f"[sweep] {path} -> {summary['output_dir']}")
            except Exception as exc:
                failures.append((path, exc))
                print(f"[sweep] {path} FAILED: {exc}", file=sys.stderr)
    if failures:
        raise failures[0][1]
    return EXIT_OK


def _cmd_check_pe(args) -> int:
    cfg = load_config(args.config)
    summary = run_experiment(cfg)
    pe = summary.pe
    verdict = pe["min"] is not None and pe["min"] > cfg.pe_threshold
    print(json.dumps({
        "window": pe["window"],
        "threshold": cfg.pe_threshold,
        "ready_from": pe["ready_from"],
        "pe_min_eig_min": pe["min"],
        "pe_min_eig_final": pe["final"],
        "persistently_exciting": verdict,
    }, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frictionobs",
        description="Simulate rolling-contact ODE-PDE dynamics and estimate "
                    "states and friction parameters from boundary data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario and write CSV outputs")
    p_sim.add_argument("--config", required=True, help="scenario JSON file")
    p_sim.add_argument("--out", default=None, help="output directory (overrides config)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run every config matching a glob")
    p_sweep.add_argument("--configs", required=True, help="glob of scenario files")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_pe = sub.add_parser("check-pe", help="report the excitation monitor for a scenario")
    p_pe.add_argument("--config", required=True, help="scenario JSON file")
    p_pe.set_defaults(func=_cmd_check_pe)

    p_ver = sub.add_parser("version", help="print the package version")
    p_ver.set_defaults(func=lambda args: print(__version__) or EXIT_OK)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        return _error(str(exc), EXIT_CONFIG)
    except BlowUpError as exc:
        return _error(str(exc), EXIT_BLOWUP)
    except OSError as exc:
        return _error(str(exc), EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
