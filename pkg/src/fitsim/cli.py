"""Command line front end.

Three subcommands::

    fitsim run       one scenario, trajectory as CSV
    fitsim compare   all configured scenarios: CSV, plot data, checks
    fitsim validate  metrics against history plus the stress suites

``run`` and ``compare`` write into the directory named by ``--out``, or
stream the main CSV to stdout when it is ``-`` (the default). Exit codes:
0 on success, 1 when a check fails, 2 on bad usage or configuration.
Output is byte-deterministic for a given config and flag set.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import ConfigDocument, load_config, load_default_config
from .engine import ConfigurationError, SimulationClock, SimulationError
from .model import FitModel, apply_overrides
from .output import (
    emit_comparison_csv,
    emit_run_csv,
    findings_text,
    outcome_table,
    write_comparison_charts,
    write_plot_data,
)
from .policies import make_policy_fn, qualitative_checks, run_scenario_suite
from .validation import (
    error_metrics,
    extreme_condition_suite,
    load_series_csv,
    sensitivity_suite,
)

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fitsim",
        description="Stock-flow simulator of a feed-in-tariff program")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="configuration file (default: packaged config)")
    common.add_argument("--dt", type=float, metavar="YEARS",
                        help="override the integration step")
    common.add_argument("--horizon", type=float, metavar="YEAR",
                        help="override the end year")

    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common],
                         help="simulate one scenario and emit its trajectory")
    run.add_argument("--scenario", default="base", metavar="NAME")
    run.add_argument("--out", default="-", metavar="DIR",
                     help="output directory; '-' streams the CSV to stdout")
    run.add_argument("--variables", metavar="A,B,C",
                     help="comma-separated subset of columns")

    compare = sub.add_parser(
        "compare", parents=[common],
        help="run all configured scenarios and check the orderings")
    compare.add_argument("--out", default="-", metavar="DIR",
                         help="output directory for the combined CSV and "
                              "per-variable plot data; '-' streams the "
                              "combined CSV to stdout")
    compare.add_argument("--charts", action="store_true",
                         help="also write one SVG per key variable "
                              "(needs --out DIR)")

    validate = sub.add_parser(
        "validate", parents=[common],
        help="error metrics against history plus the stress suites")
    validate.add_argument("--scenario", default="base", metavar="NAME")
    validate.add_argument("--historical", metavar="CSV",
                          help="two-column year,value history")
    validate.add_argument("--historical-variable", metavar="NAME",
                          default="installed_capacity",
                          help="model variable the history refers to")
    return parser


def _load_document(args) -> ConfigDocument:
    doc = load_config(args.config) if args.config else load_default_config()
    if args.dt is None and args.horizon is None:
        return doc
    clock = SimulationClock(
        doc.clock.start_year,
        args.horizon if args.horizon is not None else doc.clock.end_year,
        args.dt if args.dt is not None else doc.clock.dt)
    scenarios = tuple(replace(scenario, clock=clock)
                      for scenario in doc.scenarios)
    return replace(doc, clock=clock, scenarios=scenarios)


def _cmd_run(args) -> int:
    doc = _load_document(args)
    scenario = doc.scenario(args.scenario)
    params = apply_overrides(doc.params, scenario.overrides)
    policy = make_policy_fn(scenario.policy, params.econ.res_tax_base)
    result = FitModel(params, policy).simulate(scenario.clock)
    variables = ()
    if args.variables:
        variables = tuple(name.strip() for name in args.variables.split(",")
                          if name.strip())
    if args.out == "-":
        emit_run_csv(result, sys.stdout, variables)
        return 0
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"{scenario.name}.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        emit_run_csv(result, handle, variables)
    print(f"{scenario.name}: {result.n_records} records -> {path}",
          file=sys.stderr)
    return 0


def _cmd_compare(args) -> int:
    doc = _load_document(args)
    report = run_scenario_suite(doc.params, list(doc.scenarios))
    if args.out == "-":
        if args.charts:
            print("error: --charts needs --out DIR", file=sys.stderr)
            return 2
        emit_comparison_csv(report, sys.stdout)
    else:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "comparison.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            emit_comparison_csv(report, handle)
        written = [path] + write_plot_data(report, args.out)
        if args.charts:
            written += write_comparison_charts(report, args.out)
        for item in written:
            print(f"wrote {item}", file=sys.stderr)
    print(outcome_table(report), file=sys.stderr)
    try:
        findings = qualitative_checks(report)
    except ValueError:
        # not the canonical four-scenario set; nothing to check
        return 0
    print(findings_text(findings), file=sys.stderr)
    return 0 if all(finding.passed for finding in findings) else 1


def _cmd_validate(args) -> int:
    doc = _load_document(args)
    scenario = doc.scenario(args.scenario)
    params = apply_overrides(doc.params, scenario.overrides)
    failed = False

    if args.historical:
        years, values = load_series_csv(args.historical)
        policy = make_policy_fn(scenario.policy, params.econ.res_tax_base)
        result = FitModel(params, policy).simulate(scenario.clock)
        simulated = [result.at_year(args.historical_variable, year)
                     for year in years]
        report = error_metrics(simulated, values)
        print(f"fit of {args.historical_variable} against "
              f"{args.historical} ({len(years)} points):")
        print(f"  r_squared = {report.r_squared:.6f}")
        print(f"  mse       = {report.mse:.6g}")
        print(f"  rmspe     = {report.rmspe:.4f}%")
        print(f"  theil um/us/uc = {report.theil_um:.4f} "
              f"{report.theil_us:.4f} {report.theil_uc:.4f}")

    findings = extreme_condition_suite(params, scenario.clock)
    findings += sensitivity_suite(params, clock=scenario.clock)
    print(findings_text(findings))
    failed = failed or not all(finding.passed for finding in findings)
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "compare": _cmd_compare,
                "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except (ConfigurationError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
