"""Command-line front end: ``wsncov {coverage,link,figure5,figure6,simulate}``.

Every command prints a JSON document that echoes the fully resolved options
(including the seed) so that feeding the ``config`` block back through
``--config`` reproduces the run. Exit codes: 0 ok, 1 usage/validation,
2 quadrature convergence failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .coverage import DeploymentConfig, Region, coverage_for_model
from .errors import ConfigurationError, ConvergenceError, DomainError
from .link import LinkModel, RadioParams, link_probability, range_from_budget
from .numerics import make_stream
from .sensing import (
    BooleanSensing,
    ElfesSensing,
    SensingBudget,
    ShadowFadingSensing,
    model_to_dict,
    sensing_range_from_budget,
)
from .simulator import (
    DEFAULT_SEED,
    TrialPlan,
    estimate_coverage,
    estimate_link_rate,
    resolve_margin,
)

OUTPUT_DIR_ENV = "WSNCOV_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3

FIG5_RADIUS = 1000.0
FIG5_RMAX = 50.0
FIG6_GRID = np.arange(5, 301) / 100.0  # d / R_0 from 0.05 to 3.00

# dests that belong to the sensing-model flag group, keyed by the model that uses them
_MODEL_FLAGS = {
    "boolean": {"rs", "ps", "ps_th", "pl_ref", "x0", "n"},
    "elfes": {"r1", "rmax", "lam", "beta"},
    "shadow": {"rs", "ps", "ps_th", "pl_ref", "x0", "n", "sigma"},
}
_ALL_MODEL_FLAGS = set().union(*_MODEL_FLAGS.values())
_MODEL_DICT_KEYS = {"r_s": "rs", "R_1": "r1", "R_max": "rmax", "lambda": "lam",
                    "beta": "beta", "n": "n", "sigma": "sigma"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _flag(dest: str) -> str:
    return {"lam": "--lambda", "ps_th": "--ps-th", "pl_ref": "--pl-ref",
            "per_trial_csv": "--per-trial-csv", "shadow_mode": "--shadow-mode",
            "shadow_method": "--shadow-method"}.get(dest, "--" + dest.replace("_", "-"))


def _add_sensing_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sensing model")
    g.add_argument("--model", choices=("boolean", "elfes", "shadow"), default=None)
    g.add_argument("--rs", type=float, help="sensing range r_s [m]")
    g.add_argument("--r1", type=float, help="Elfes certain-detection radius R_1 [m]")
    g.add_argument("--rmax", type=float, help="Elfes maximum range R_max [m]")
    g.add_argument("--lambda", dest="lam", type=float, help="Elfes decay rate [1/m]")
    g.add_argument("--beta", type=float, help="Elfes decay exponent")
    g.add_argument("--ps", type=float, help="event power [dBm] (derive r_s from budget)")
    g.add_argument("--ps-th", dest="ps_th", type=float, help="sensing sensitivity [dBm]")
    g.add_argument("--pl-ref", dest="pl_ref", type=float, help="path loss at --x0 [dB]")
    g.add_argument("--x0", type=float, help="reference distance [m]")


def _add_radio_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("link model")
    g.add_argument("--r0", type=float, help="non-shadowed communication range R_0 [m]")
    g.add_argument("--pt", type=float, help="transmit power [dBm] (derive R_0 from budget)")
    g.add_argument("--prth", type=float, help="receiver sensitivity [dBm]")
    g.add_argument("--pl-ref-link", dest="pl_ref_link", type=float,
                   help="path loss at --d0 [dB]")
    g.add_argument("--d0", type=float, help="reference distance [m]")
    g.add_argument("--d", type=float, help="link distance [m]")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file of option values; flags win")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="wsncov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("coverage", help="analytic coverage fraction")
    _add_common(p)
    _add_sensing_flags(p)
    p.add_argument("--n", type=float, help="path-loss exponent")
    p.add_argument("--sigma", type=float, help="shadowing deviation [dB]")
    p.add_argument("--radius", type=float, default=FIG5_RADIUS)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--mode", choices=("exact", "approx"), default="exact")
    p.add_argument("--shadow-mode", dest="shadow_mode", choices=("expected", "confidence"),
                   default="expected")
    p.add_argument("--shadow-method", dest="shadow_method",
                   choices=("closed-form", "quadrature"), default="closed-form")
    p.add_argument("--epsilon", type=float, default=None)
    subs["coverage"] = p

    p = sub.add_parser("link", help="pairwise link probability")
    _add_common(p)
    _add_radio_flags(p)
    p.add_argument("--n", type=float, help="path-loss exponent")
    p.add_argument("--sigma", type=float, help="shadowing deviation [dB]")
    subs["link"] = p

    p = sub.add_parser("figure5", help="coverage vs node count curves (CSV)")
    _add_common(p)
    p.add_argument("--output", type=Path, default=None)
    p.add_argument("--mode", choices=("exact", "approx"), default="exact")
    p.add_argument("--epsilon", type=float, default=0.9)
    p.add_argument("--n-shadow", dest="n_shadow", type=float, default=2.0)
    p.add_argument("--nodes-start", dest="nodes_start", type=int, default=100)
    p.add_argument("--nodes-stop", dest="nodes_stop", type=int, default=10000)
    p.add_argument("--nodes-step", dest="nodes_step", type=int, default=100)
    subs["figure5"] = p

    p = sub.add_parser("figure6", help="link probability vs normalised distance (CSV)")
    _add_common(p)
    p.add_argument("--output", type=Path, default=None)
    subs["figure6"] = p

    p = sub.add_parser("simulate", help="Monte Carlo coverage or link-rate estimate")
    _add_common(p)
    p.add_argument("--target", choices=("coverage", "link"), default="coverage")
    _add_sensing_flags(p)
    _add_radio_flags(p)
    p.add_argument("--n", type=float, help="path-loss exponent")
    p.add_argument("--sigma", type=float, help="shadowing deviation [dB]")
    p.add_argument("--radius", type=float, default=FIG5_RADIUS)
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--events", type=int, default=500)
    p.add_argument("--margin", type=float, default=None,
                   help="event margin [m]; default is the model's reach")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--per-trial-csv", dest="per_trial_csv", type=Path, default=None)
    subs["simulate"] = p
    return parser, subs


def _load_config(path: Path, sub: argparse.ArgumentParser) -> dict:
    text = path.read_text()
    try:
        raw = json.loads(text)
    except ValueError as exc:
        raise UsageError(f"--config {path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise UsageError(f"--config {path}: expected a JSON object")
    known = {a.dest for a in sub._actions}
    values = {}
    for key, value in raw.items():
        if key == "model" and isinstance(value, dict):
            values["model"] = value.get("model")
            for mkey, mval in value.items():
                if mkey != "model":
                    if mkey not in _MODEL_DICT_KEYS:
                        raise UsageError(f"--config: unknown model field {mkey!r}")
                    values[_MODEL_DICT_KEYS[mkey]] = mval
            continue
        dest = key.replace("-", "_")
        if dest == "lambda":
            dest = "lam"
        if dest in ("command", "config"):
            continue
        if dest not in known:
            raise UsageError(f"--config: unknown option {key!r}")
        values[dest] = value
    return values


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        sub = subs[args.command]
        sub.set_defaults(**_load_config(args.config, sub))
        args = parser.parse_args(argv)
    return args


def _require(args, *dests):
    for dest in dests:
        if getattr(args, dest, None) is None:
            raise UsageError(f"{_flag(dest)} is required here")


def _reject(args, dests, reason: str):
    for dest in sorted(dests):
        if getattr(args, dest, None) is not None:
            raise UsageError(f"{_flag(dest)} {reason}")


def sensing_model_from_args(args):
    kind = args.model = args.model or "boolean"
    _reject(args, _ALL_MODEL_FLAGS - _MODEL_FLAGS[kind], f"does not apply to --model {kind}")
    budget_flags = ("ps", "ps_th", "pl_ref", "x0")
    if kind in ("boolean", "shadow"):
        if kind == "boolean" and args.rs is None and args.ps is None:
            args.rs = FIG5_RMAX
        if args.rs is not None:
            _reject(args, budget_flags, "conflicts with --rs")
            if kind == "boolean" and args.n is not None:
                raise UsageError("--n only applies to a Boolean model when deriving r_s "
                                 "from a budget")
            r_s = args.rs
        else:
            _require(args, *budget_flags, "n")
            r_s = sensing_range_from_budget(
                SensingBudget(args.ps, args.ps_th, args.pl_ref, args.x0, args.n))
        if kind == "boolean":
            return BooleanSensing(r_s)
        _require(args, "n", "sigma")
        return ShadowFadingSensing(r_s, args.n, args.sigma)

    _require(args, "rmax", "lam")
    r1 = 0.0 if args.r1 is None else args.r1
    if r1 > args.rmax:
        raise UsageError(f"--r1 {r1:g} exceeds --rmax {args.rmax:g}")
    if r1 < 0:
        raise UsageError("--r1 must be non-negative")
    if args.lam < 0:
        raise UsageError("--lambda must be non-negative")
    beta = 1.0 if args.beta is None else args.beta
    if beta <= 0:
        raise UsageError("--beta must be positive")
    return ElfesSensing(r1, args.rmax, args.lam, beta)


def link_model_from_args(args) -> LinkModel:
    _require(args, "n", "sigma")
    budget = ("pt", "prth", "pl_ref_link", "d0")
    if args.r0 is not None:
        _reject(args, budget, "conflicts with --r0")
        return LinkModel(args.r0, args.n, args.sigma)
    _require(args, *budget)
    return range_from_budget(RadioParams(args.pt, args.prth, args.pl_ref_link, args.d0,
                                         args.n, args.sigma))


def _resolved(args, drop=("config", "command", "workers")) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in drop or value is None:
            continue
        out[key] = str(value) if isinstance(value, Path) else value
    return out


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _fmt(x: float) -> str:
    return format(float(x), "#.12g")


def _output_path(args, default_name: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    path = args.output if args.output is not None else Path(default_name)
    return path if path.is_absolute() else base / path


def cmd_coverage(args) -> int:
    _require(args, "nodes")
    if args.nodes < 0:
        raise UsageError("--nodes must be non-negative")
    model = sensing_model_from_args(args)
    if args.epsilon is not None and not (isinstance(model, ShadowFadingSensing)
                                         and args.shadow_mode == "confidence"):
        raise UsageError("--epsilon only applies with --model shadow --shadow-mode confidence")
    config = DeploymentConfig(Region(args.radius), args.nodes, args.seed)
    result = coverage_for_model(model, config, mode=args.mode, shadow_mode=args.shadow_mode,
                                epsilon=args.epsilon, shadow_method=args.shadow_method)
    _emit({"command": "coverage", "config": _resolved(args), "model": model_to_dict(model),
           "result": result.to_dict()})
    return EXIT_OK


def cmd_link(args) -> int:
    _require(args, "d")
    model = link_model_from_args(args)
    p = link_probability(model, args.d)
    _emit({"command": "link", "config": _resolved(args), "link_model": model.to_dict(),
           "result": {"probability": p}})
    return EXIT_OK


def figure5_curves(n_shadow: float = 2.0, epsilon: float = 0.9) -> dict:
    """Curve label -> (model, analytic options) for the coverage-vs-N family."""
    return {
        "a": (BooleanSensing(FIG5_RMAX), {}),
        "b-expected": (ShadowFadingSensing(FIG5_RMAX, n_shadow, 2.0), {"shadow_mode": "expected"}),
        "b-confidence": (ShadowFadingSensing(FIG5_RMAX, n_shadow, 2.0),
                         {"shadow_mode": "confidence", "epsilon": epsilon}),
        "c": (ElfesSensing(0.0, FIG5_RMAX, 0.01), {}),
        "d-expected": (ShadowFadingSensing(FIG5_RMAX, n_shadow, 8.0), {"shadow_mode": "expected"}),
        "d-confidence": (ShadowFadingSensing(FIG5_RMAX, n_shadow, 8.0),
                         {"shadow_mode": "confidence", "epsilon": epsilon}),
        "e": (ElfesSensing(10.0, FIG5_RMAX, 0.03), {}),
        "f": (ElfesSensing(0.0, FIG5_RMAX, 0.03), {}),
    }


def figure6_curves() -> dict:
    return {
        "a": LinkModel(1.0, 2.0, 0.0),
        "b": LinkModel(1.0, 2.0, 4.0),
        "c": LinkModel(1.0, 2.0, 8.0),
        "d": LinkModel(1.0, 3.0, 4.0),
        "e": LinkModel(1.0, 3.0, 8.0),
    }


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_figure5(args) -> int:
    if args.nodes_step < 1 or args.nodes_start < 0 or args.nodes_stop <= args.nodes_start:
        raise UsageError("--nodes-start/--nodes-stop/--nodes-step must describe an "
                         "increasing grid")
    grid = range(args.nodes_start, args.nodes_stop + 1, args.nodes_step)
    curves = figure5_curves(args.n_shadow, args.epsilon)
    region = Region(FIG5_RADIUS)
    rows = []
    params = {}
    for label, (model, opts) in curves.items():
        params[label] = {"model": model_to_dict(model), **opts}
        for n_nodes in grid:
            result = coverage_for_model(model, DeploymentConfig(region, n_nodes, args.seed),
                                        mode=args.mode, **opts)
            rows.append((n_nodes, label, _fmt(result.value)))
    path = _output_path(args, "figure5.csv")
    _write_csv(path, ("N", "curve", "coverage"), rows)
    _emit({"command": "figure5", "config": _resolved(args), "output": str(path),
           "radius": FIG5_RADIUS, "curves": params, "rows": len(rows)})
    return EXIT_OK


def cmd_figure6(args) -> int:
    curves = figure6_curves()
    rows = []
    for label, model in curves.items():
        probs = link_probability(model, FIG6_GRID)
        rows.extend((_fmt(t), label, _fmt(p)) for t, p in zip(FIG6_GRID, probs))
    path = _output_path(args, "figure6.csv")
    _write_csv(path, ("d_over_R0", "curve", "probability"), rows)
    _emit({"command": "figure6", "config": _resolved(args), "output": str(path),
           "curves": {k: m.to_dict() for k, m in curves.items()}, "rows": len(rows)})
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    if args.target == "link":
        _reject(args, (_ALL_MODEL_FLAGS - {"n", "sigma"}) | {"model"},
                "does not apply to --target link")
        _require(args, "d")
        if args.samples < 1:
            raise UsageError("--samples must be at least 1")
        if args.d < 0:
            raise UsageError("--d must be non-negative")
        model = link_model_from_args(args)
        estimate = estimate_link_rate(model, args.d, args.samples, make_stream(args.seed, 0))
        resolved = _resolved(args, drop=("config", "command", "workers", "radius", "nodes",
                                         "trials", "events", "margin", "per_trial_csv"))
        _emit({"command": "simulate", "config": resolved, "link_model": model.to_dict(),
               "result": estimate.to_dict(),
               "analytic": {"probability": link_probability(model, args.d)}})
        return EXIT_OK

    _reject(args, {"r0", "pt", "prth", "pl_ref_link", "d0", "d"}, "applies only to --target link")
    if args.trials < 1 or args.events < 1:
        raise UsageError("--trials and --events must be at least 1")
    if args.nodes < 0:
        raise UsageError("--nodes must be non-negative")
    model = sensing_model_from_args(args)
    config = DeploymentConfig(Region(args.radius), args.nodes, args.seed)
    plan = TrialPlan(args.trials, args.events, args.margin, args.seed)
    if args.nodes > 0:
        try:
            margin = resolve_margin(model, config, plan)
        except DomainError as exc:
            raise UsageError(f"--margin: {exc}") from None
    else:
        margin = plan.event_margin
    estimate = estimate_coverage(model, config, plan, workers=args.workers)
    doc = {"command": "simulate", "config": _resolved(args, drop=(
        "config", "command", "workers", "samples")),
        "model": model_to_dict(model), "event_margin": margin,
        "result": estimate.to_dict()}
    try:
        doc["analytic"] = coverage_for_model(model, config).to_dict()
    except (DomainError, ConfigurationError) as exc:
        doc["analytic"] = {"unavailable": str(exc)}
    if args.per_trial_csv is not None:
        _write_csv(args.per_trial_csv, ("trial_index", "successes", "events"),
                   [(i, s, args.events) for i, s in enumerate(estimate.trial_successes)])
    _emit(doc)
    return EXIT_OK


COMMANDS = {
    "coverage": cmd_coverage,
    "link": cmd_link,
    "figure5": cmd_figure5,
    "figure6": cmd_figure6,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, DomainError, ConfigurationError) as exc:
        print(f"wsncov: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"wsncov: numeric failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"wsncov: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
