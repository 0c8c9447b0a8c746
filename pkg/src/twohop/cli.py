"""Command-line entry point: ``twohop {simulate,analytic,both,preset}``.

Exit codes: 0 success, 2 invalid configuration, 3 analytic budget
exhausted, 4 no source inside the measurement region, 5 interrupted
(rows finished before the interrupt remain in the output file).
"""

from __future__ import annotations

import argparse
import math
import sys

import yaml

from .analytic import BudgetExceeded
from .experiments import (AXIS_POLICY, DEFAULTS, SWEEP_AXES, ConfigError, ExperimentSpec,
                          run_experiment, run_preset)
from .geometry import ParameterError
from .simulation import EstimationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_EMPTY = 4
EXIT_INTERRUPTED = 5

# flag -> (section, key)
MODEL_FLAGS = {
    "lambda_s": ("model", "lambda_s"), "lambda_r": ("model", "lambda_r"), "R": ("model", "R"),
    "T": ("model", "T"), "alpha": ("model", "alpha"),
    "half_width": ("simulation", "half_width"), "guard_margin": ("simulation", "guard_margin"),
    "trials": ("simulation", "n_trials"), "tolerance": ("quadrature", "p2_rel_tol"),
    "policy": ("policy", "name"), "parameter": ("policy", "parameter"),
    "own_cluster": ("analytic", "own_cluster"),
}


def _parse_value(text):
    value = yaml.safe_load(text)
    if isinstance(value, str) and value.lower() in ("pi", "-pi"):
        return math.copysign(math.pi, -1 if value.startswith("-") else 1)
    return value


def parse_sweep(text):
    """``AXIS=v1,v2,...`` into ``(axis, [values])``."""
    if "=" not in text:
        raise ConfigError("--sweep", "expected AXIS=v1,v2,...")
    axis, vals = text.split("=", 1)
    try:
        values = [float(v) for v in vals.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError("--sweep", str(exc)) from exc
    return axis.strip(), values


def build_spec(args) -> ExperimentSpec:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from exc
        except yaml.YAMLError as exc:
            raise ConfigError("--config", f"invalid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("--config", "top level must be a mapping")
    data["mode"] = args.command
    for flag, (section, key) in MODEL_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data.setdefault(section, {})[key] = value
    if args.bounded:
        data.setdefault("model", {})["bounded"] = True
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError("--set", f"expected section.key=value, got {item!r}")
        path, raw = item.split("=", 1)
        parts = path.split(".")
        if len(parts) != 2:
            raise ConfigError("--set", f"expected section.key, got {path!r}")
        data.setdefault(parts[0], {})[parts[1]] = _parse_value(raw)
    if args.sweep:
        axis, values = parse_sweep(args.sweep)
        data["sweep"] = {"axis": axis, "values": values}
    sweep = data.get("sweep") or {}
    # a parameter sweep implies its policy unless one was given
    axis = sweep.get("axis")
    if axis in AXIS_POLICY and "name" not in data.get("policy", {}):
        data.setdefault("policy", {})["name"] = AXIS_POLICY[axis]
    if args.seed is not None:
        data["seed"] = args.seed
    if args.output is not None:
        data["output"] = args.output
    if args.timing:
        data["record_timing"] = True
    return ExperimentSpec.from_dict(data)


def _defaults_text():
    m, s = DEFAULTS["model"], DEFAULTS["simulation"]
    return (f"defaults: lambda_s={m['lambda_s']}, lambda_r={m['lambda_r']}, R={m['R']}, "
            f"T={m['T']}, alpha={m['alpha']}, half_width={s['half_width']}, "
            f"guard_margin={s['guard_margin']}, trials={s['n_trials']}, "
            f"tolerance={DEFAULTS['quadrature']['p2_rel_tol']}, seed=0")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twohop", description="Two-hop relaying in random ad hoc networks.",
        epilog="Exit codes: 0 ok, 2 bad configuration, 3 analytic budget exhausted, "
               "4 empty measurement region, 5 interrupted.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "Monte Carlo estimates"),
                        ("analytic", "stochastic-geometry evaluation"),
                        ("both", "both, with the absolute Ps gap per point")):
        p = sub.add_parser(name, help=help_, description=help_ + ". " + _defaults_text())
        p.add_argument("--config", help="YAML file; flags override its entries")
        p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                       help="override one configuration entry (repeatable)")
        p.add_argument("--sweep", metavar="AXIS=V1,V2,...",
                       help=f"sweep one of {', '.join(SWEEP_AXES)}")
        p.add_argument("--lambda-s", dest="lambda_s", type=float, help="source density")
        p.add_argument("--lambda-r", dest="lambda_r", type=float, help="relay density")
        p.add_argument("-R", dest="R", type=float, help="source-destination distance")
        p.add_argument("-T", dest="T", type=float, help="SIR threshold")
        p.add_argument("--alpha", type=float, help="path-loss exponent (> 2)")
        p.add_argument("--bounded", action="store_true", help="use min(1, d^-alpha)")
        p.add_argument("--policy", help="all, rss, sector, distance or center (simulation only)")
        p.add_argument("--parameter", type=float, help="delta, theta or epsilon")
        p.add_argument("--own-cluster", dest="own_cluster", choices=("oriented", "averaged"),
                       help="analytic treatment of the tagged source's own relays")
        p.add_argument("--half-width", dest="half_width", type=float, help="window half-width")
        p.add_argument("--guard-margin", dest="guard_margin", type=float,
                       help="guard margin (default: half-width / 3 if null)")
        p.add_argument("--trials", type=int, help="Monte Carlo trials per point")
        p.add_argument("--tolerance", type=float, help="relative tolerance on analytic P2")
        _common(p)
        p.add_argument("--timing", action="store_true", help="add a wall_time column")
    p = sub.add_parser("preset", help="reproduce a figure",
                       description="Run a figure preset: fig1, fig2 or fig3.")
    p.add_argument("name", choices=("fig1", "fig2", "fig3"))
    p.add_argument("--scale", choices=("desk", "full"), default="desk",
                   help="desk: minutes on a laptop (default); full: larger windows and more trials")
    _common(p)
    return parser


def _common(p):
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--output", "-o", help="CSV path (default: standard output)")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel sweep points (capped by TWOHOP_MAX_WORKERS)")


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "preset":
            rows = run_preset(args.name, args.scale, 1 if args.seed is None else args.seed,
                              args.output, args.workers,
                              stream=None if args.output else sys.stdout)
        else:
            spec = build_spec(args)
            rows = run_experiment(spec, args.workers,
                                  stream=None if spec.output else sys.stdout)
        gaps = [r["gap_Ps"] for r in rows if r.get("gap_Ps") is not None]
        if gaps:
            print(f"max |Ps_sim - Ps_analytic| = {max(gaps):.4g} over {len(gaps)} point(s)",
                  file=sys.stderr)
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"analytic budget exhausted: {exc} (partial P2={exc.partial}, "
              f"achieved tolerance={exc.achieved_tolerance})", file=sys.stderr)
        return EXIT_BUDGET
    except EstimationError as exc:
        print(f"empty measurement: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except KeyboardInterrupt:
        print("interrupted; completed rows were kept", file=sys.stderr)
        return EXIT_INTERRUPTED
    return EXIT_OK


def main_exit():
    sys.exit(main())
