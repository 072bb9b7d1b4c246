"""Command-line entry point.

Exit codes: 0 all checks passed, 2 configuration problem, 3 the data
left the admissible set, 4 the blow-up criterion fired, 5 a scenario
assertion failed without an exceptional flow.
"""

from __future__ import annotations

import argparse
import sys

from .config import (SCENARIO_NAMES, apply_overrides, default_settings,
                     load_settings)
from .errors import (AdmissibilityError, BlowUpError, ConfigError,
                     NonContractionError)
from .scenarios import run_scenario, sweep

EXIT_PASS = 0
EXIT_CONFIG = 2
EXIT_ADMISSIBILITY = 3
EXIT_BLOWUP = 4
EXIT_ASSERTION = 5


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="settings file (key = value sections)")
    parser.add_argument("--out", help="output root (defaults to "
                                      "$WHITHAMLAB_OUT, then ./runs)")
    parser.add_argument("--seed", type=int, help="override the random seed")
    parser.add_argument("--n", type=int, dest="grid_n",
                        help="grid points on the torus")
    parser.add_argument("--period", type=float, dest="grid_period",
                        help="spatial period")
    # one flag per time-stepping field, same spelling as the config keys
    parser.add_argument("--T", type=float, help="time horizon")
    parser.add_argument("--dt", type=float, help="time step")
    parser.add_argument("--N", type=int, help="Sobolev order of the energy")
    parser.add_argument("--epsilon", type=float, help="mollifier width")
    parser.add_argument("--eta-bar", type=float, dest="eta_bar",
                        help="reference elevation (default: data mean)")
    parser.add_argument("--dealias", type=_bool, metavar="BOOL",
                        help="two-thirds truncation of products")
    parser.add_argument("--tol", type=float,
                        help="iteration convergence tolerance")
    parser.add_argument("--max-iter", type=int, dest="max_iter",
                        help="iteration cap")
    parser.add_argument("--param", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="scenario parameter override (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whithamlab",
        description="Simulation laboratory for the two-way Whitham system.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one scenario")
    run_p.add_argument("scenario", choices=SCENARIO_NAMES)
    _add_common(run_p)

    sweep_p = sub.add_parser("sweep", help="run a scenario across values "
                                           "of one parameter")
    sweep_p.add_argument("parameter")
    sweep_p.add_argument("values", help="comma-separated list")
    _add_common(sweep_p)

    verify_p = sub.add_parser("verify", help="run the full inequality suite")
    _add_common(verify_p)
    return parser


def _settings_from(args, scenario=None):
    if args.config:
        settings = load_settings(args.config, scenario=scenario)
    elif scenario is not None:
        settings = default_settings(scenario)
    else:
        raise ConfigError("sweep needs --config to name the scenario")
    solve_overrides = {}
    for key in ("T", "dt", "N", "epsilon", "eta_bar", "dealias", "tol",
                "max_iter"):
        value = getattr(args, key, None)
        if value is not None:
            solve_overrides[key] = value
    return apply_overrides(settings,
                           grid_n=args.grid_n,
                           grid_period=args.grid_period,
                           seed=args.seed,
                           out_root=args.out,
                           solve_overrides=solve_overrides or None,
                           param_overrides=args.param or None)


def _report(manifest) -> int:
    failures = [a["name"] for a in manifest.assertions if not a["passed"]]
    print(f"{manifest.scenario} [{manifest.run_id}] status={manifest.status} "
          f"{manifest.headline_name}={manifest.headline_value:.6g}")
    for entry in manifest.assertions:
        mark = "ok " if entry["passed"] else "FAIL"
        print(f"  {mark} {entry['name']}: {entry['detail']}")
    return EXIT_PASS if not failures else EXIT_ASSERTION


def _parse_values(text: str):
    items = [chunk.strip() for chunk in text.split(",") if chunk.strip()]
    if not items:
        raise ConfigError("sweep needs a non-empty value list")
    out = []
    for item in items:
        try:
            out.append(int(item))
        except ValueError:
            try:
                out.append(float(item))
            except ValueError:
                out.append(item)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            settings = _settings_from(args, scenario=args.scenario)
            return _report(run_scenario(settings))
        if args.command == "sweep":
            settings = _settings_from(args)
            manifests, aggregate = sweep(args.parameter,
                                         _parse_values(args.values), settings)
            print(f"sweep of {args.parameter} over {len(manifests)} runs; "
                  f"aggregate: {aggregate}")
            worst = EXIT_PASS
            for manifest in manifests:
                code = _report(manifest)
                worst = max(worst, code if manifest.status in ("pass", "fail")
                            else EXIT_ASSERTION)
            return worst
        # verify: the inequality suite is the library's self-test
        settings = _settings_from(args, scenario="inequality-suite")
        return _report(run_scenario(settings))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdmissibilityError as exc:
        print(f"admissibility violated: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except BlowUpError as exc:
        print(f"blow-up criterion fired: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except NonContractionError as exc:
        print(f"iteration failed to contract: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
