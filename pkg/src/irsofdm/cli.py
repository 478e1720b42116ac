"""Command-line front end.

    irsofdm run CONFIG [--scenario S] [--seed N] [--drops N] [--out FILE]
    irsofdm validate-config CONFIG

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys

from .circuit import SingularCircuitError, UnreachablePhaseError
from .config import SCENARIOS, ConfigError, load_config
from .experiments import (
    run_convergence_trace,
    run_model_validation,
    run_rate_vs_elements,
    run_rate_vs_power,
    write_result_csv,
)
from .optimizer import PowerAllocationError
from .reflection_model import FitConstraintError

_NUMERICAL_ERRORS = (SingularCircuitError, UnreachablePhaseError,
                     PowerAllocationError, FitConstraintError, FloatingPointError)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="irsofdm",
        description="Wideband OFDM link simulator for reconfigurable reflecting surfaces")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario described by a YAML config")
    run_p.add_argument("config", help="path to the YAML configuration")
    run_p.add_argument("--scenario", choices=SCENARIOS, help="override the configured scenario")
    run_p.add_argument("--seed", type=int, help="override the random seed")
    run_p.add_argument("--drops", type=int, help="override the number of Monte Carlo drops")
    run_p.add_argument("--out", help="override the output CSV path")

    val_p = sub.add_parser("validate-config", help="check a config file and exit")
    val_p.add_argument("config", help="path to the YAML configuration")
    return parser


def _emit(result, out):
    if out:
        write_result_csv(out, result)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(result.header)
        for row in result.rows():
            writer.writerow([str(v) for v in row])


def _cmd_run(args):
    cfg = load_config(args.config)
    overrides = {}
    if args.scenario is not None:
        overrides["scenario"] = args.scenario
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.drops is not None:
        overrides["n_drops"] = args.drops
    if overrides:
        try:
            cfg = dataclasses.replace(cfg, **overrides)
        except ValueError as exc:
            raise ConfigError(f"invalid override: {exc}") from exc
    out = args.out or cfg.output_csv

    if cfg.scenario == "model-validation":
        result = run_model_validation(cfg)
        _emit(result, out)
        for curve in result.curves:
            print(f"target {curve.target_phase_deg:+.1f} deg: "
                  f"max phase error {curve.max_phase_error:.4f} rad, "
                  f"max amplitude error {curve.max_amplitude_error:.4f}", file=sys.stderr)
        if result.errors:
            for deg, message in result.errors:
                print(f"target {deg:+.1f} deg failed: {message}", file=sys.stderr)
            return 3
        return 0

    if cfg.scenario == "rate-vs-power":
        result = run_rate_vs_power(cfg)
    elif cfg.scenario == "rate-vs-elements":
        result = run_rate_vs_elements(cfg)
    elif cfg.scenario == "convergence-trace":
        result = run_convergence_trace(cfg)
        _emit(result, out)
        print(f"final rate {result.final_rate:.6f} bit/s/Hz after "
              f"{result.trace.n_sweeps} sweeps (converged: {result.trace.converged})",
              file=sys.stderr)
        return 0
    else:  # unreachable, scenarios are validated by the config
        raise ConfigError(f"unknown scenario {cfg.scenario!r}")
    _emit(result, out)
    for value in result.sweep_values:
        parts = ", ".join(f"{s} {result.mean_rate(value, s):.4f}" for s in
                          ("practical", "ideal", "no_irs"))
        print(f"{result.sweep_var} = {value}: {parts} bit/s/Hz", file=sys.stderr)
    return 0


def _cmd_validate(args):
    cfg = load_config(args.config)
    print(f"ok: scenario {cfg.scenario}, seed {cfg.seed}, {cfg.n_drops} drops, "
          f"N = {cfg.system.n_elements}, K = {cfg.system.n_subcarriers}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
