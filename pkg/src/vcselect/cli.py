"""Command-line interface: bounds, invert, figures, lattice, simulate.

Exit codes: 0 success, 2 usage or configuration error, 3 numeric guard
(search ceiling, non-monotone tail, undefined margin).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import registry
from .bounds import BoundValue, MDEUndefinedError
from .lattice import build_family, enumerate_partitions
from .mc import Scenario, run_experiment
from .solver import CeilingExceeded, FigureConfig, InversionRequest, NonMonotoneTail, figure_grid, invert_for_N

OUTPUT_DIR_ENV = "VCSELECT_OUTPUT_DIR"
log = logging.getLogger("vcselect")


class UsageError(Exception):
    pass


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _pairs(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got {item!r}")
        try:
            out[key] = _number(value)
        except ValueError:
            raise UsageError(f"{key}: {value!r} is not a number") from None
    return out


def _load_json(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _output_path(given, default_name: str) -> Path:
    if given:
        return Path(given)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _as_json(value):
    return value.to_dict() if isinstance(value, BoundValue) else {"value": value}


def cmd_bounds(args) -> int:
    try:
        registry.lookup(args.name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    value = registry.evaluate(args.name, _pairs(args.params))
    _emit(_as_json(value))
    return 0


def cmd_invert(args) -> int:
    cfg = _load_json(args.config)
    name = args.bound or cfg.get("bound")
    if not name:
        raise UsageError("invert needs a bound name (--bound or config 'bound')")
    params = dict(cfg.get("params", {}))
    params.update(_pairs(args.param))
    params.pop("N", None)
    target = args.target if args.target is not None else cfg.get("target", 0.05)
    n_max = args.n_max if args.n_max is not None else cfg.get("n_max", 10**13)
    try:
        registry.lookup(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    registry.evaluate(name, {**params, "N": 10**6})
    fn = registry.lookup(name)
    n = invert_for_N(InversionRequest(lambda N: fn(N=N, **params), float(target), int(n_max)))
    result = {"bound": name, "params": params, "target": target, "N": n, "log_value": fn(N=n, **params).log_value}
    if args.out:
        Path(args.out).write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    _emit(result)
    return 0


def cmd_figures(args) -> int:
    cfg = _load_json(args.config)
    for key in ("formula", "c", "target"):
        value = getattr(args, key)
        if value is not None:
            cfg[key] = value
    try:
        config = FigureConfig.from_dict(cfg)
    except TypeError as exc:
        raise UsageError(f"bad figure config: {exc}") from None
    grid = figure_grid(config)
    path = _output_path(args.out, f"figure_{config.formula}.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(grid.to_csv())
    log.info("wrote %d cells to %s", len(grid.cells), path)
    print(path)
    return 0


def cmd_lattice(args) -> int:
    partitions = enumerate_partitions(args.n)
    out = {
        "n": args.n,
        "partitions": len(partitions),
        "families": [build_family(args.n, kind).describe() for kind in ("all-partitions", "two-block")],
    }
    if args.list:
        out["rgs"] = [str(p) for p in partitions]
    _emit(out)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_json(args.config)
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.seed is not None:
        cfg["seed"] = args.seed
    try:
        scenario = Scenario.from_dict(cfg)
    except TypeError as exc:
        raise UsageError(f"bad scenario config: {exc}") from None
    summary = run_experiment(scenario)
    path = _output_path(args.out, "experiment.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(summary.to_csv())
    log.info("wrote %d cells to %s", len(summary.cells), path)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcselect", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate a named bound")
    p.add_argument("name")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("invert", help="smallest sample size meeting a target")
    p.add_argument("--config")
    p.add_argument("--bound")
    p.add_argument("--param", action="append", metavar="key=value")
    p.add_argument("--target", type=float)
    p.add_argument("--n-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("figures", help="sample-size comparison grid as CSV")
    p.add_argument("--config")
    p.add_argument("--formula", choices=("bt4", "bt4_2"))
    p.add_argument("--c", type=float)
    p.add_argument("--target", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("lattice", help="partition and family summary")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("simulate", help="Monte Carlo experiment from a scenario file")
    p.add_argument("--config", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CeilingExceeded, NonMonotoneTail, MDEUndefinedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
