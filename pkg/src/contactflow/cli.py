"""Command-line interface.

Subcommands: simulate, benchmark, contact-check, bea, convergence.
Exit codes: 0 success, 1 configuration error, 2 numerical failure (the
failing cell is named on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys as _sys

from .errors import ConfigError, ContactflowError
from .harness import (
    BenchmarkConfig,
    emit_csv,
    emit_json,
    run_bea,
    run_benchmark,
    run_contact_check,
    run_convergence,
    run_simulate,
)


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file (BenchmarkConfig fields)")
    parser.add_argument("--out", required=True, help="output path")
    parser.add_argument("--seed", type=int, help="RNG seed override")
    parser.add_argument("--scenario", choices=["damped", "forced"])
    parser.add_argument(
        "--alpha", type=float, action="append", help="damping value (repeatable)"
    )
    parser.add_argument("--h", type=float, help="step size")
    parser.add_argument("--t-final", type=float, dest="t_final")
    parser.add_argument("--method", action="append", help="method id (repeatable)")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--omega", type=float)
    parser.add_argument("--x0", type=float)
    parser.add_argument("--p0", type=float)
    parser.add_argument("--z0", type=float)
    parser.add_argument("--momentum-init", choices=["contact_p", "leapfrog_pi"])


def _load_config(args) -> BenchmarkConfig:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    overrides = {
        "scenario": args.scenario,
        "h": args.h,
        "t_final": args.t_final,
        "beta": args.beta,
        "omega": args.omega,
        "x0": args.x0,
        "p0": args.p0,
        "z0": args.z0,
        "momentum_init": args.momentum_init,
        "seed": args.seed,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if args.alpha:
        data["alpha_list"] = args.alpha
    if args.method:
        data["methods"] = args.method
    return BenchmarkConfig.from_dict(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactflow",
        description="Contact variational integrators and benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "integrate one trajectory and write it as CSV"),
        ("benchmark", "run the error study and write it as CSV"),
        ("contact-check", "verify steps are contact transformations (JSON)"),
        ("bea", "backward-error defect-order study (JSON)"),
        ("convergence", "measured convergence orders (JSON)"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 1

    try:
        if args.command == "simulate":
            records = run_simulate(config)
            emit_csv(records, args.out)
        elif args.command == "benchmark":
            records, failures = run_benchmark(config)
            emit_csv(records, args.out)
            if failures:
                for method, alpha, msg in failures:
                    print(
                        f"cell failed: method={method} alpha={alpha}: {msg}",
                        file=_sys.stderr,
                    )
                return 2
        elif args.command == "contact-check":
            emit_json(run_contact_check(config), args.out)
        elif args.command == "bea":
            emit_json(run_bea(config), args.out)
        elif args.command == "convergence":
            emit_json(run_convergence(config), args.out)
    except ContactflowError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=_sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
