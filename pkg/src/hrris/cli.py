"""Command-line entry point: ``hrris {run,sweep,validate}``."""

import argparse
import json
import math
import os
import sys
from dataclasses import fields, replace

from . import checks
from .sim import (
    AXES,
    METHODS,
    ConfigError,
    ScenarioConfig,
    SweepRow,
    run_monte_carlo,
    sweep,
    write_results,
)

_CONFIG_KEYS = {f.name for f in fields(ScenarioConfig)}


def _decode(key, value):
    if key in ("kappa_t", "kappa_r") and isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ConfigError(key, f"only the string \"inf\" is accepted, got {value!r}")
    if key == "active_set" and value is not None and not isinstance(value, list):
        raise ConfigError(key, f"expected a list of indices, got {value!r}")
    return value


def _parse_override(text):
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(text, "override must look like key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def parse_config(path=None, overrides=()):
    """Build a validated ScenarioConfig from a JSON file plus ``key=value`` overrides.

    Missing keys keep the reference defaults; ``"inf"`` encodes an infinite
    Rician factor.
    """
    data = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as err:
            raise ConfigError("config", f"malformed JSON in {path}: {err}") from None
        except OSError as err:
            raise ConfigError("config", f"cannot read {path}: {err.strerror}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", f"{path} must contain a JSON object")
    data = dict(data)
    for item in overrides:
        key, value = _parse_override(item)
        data[key] = value

    kwargs = {}
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(key, f"unknown key; valid keys: {', '.join(sorted(_CONFIG_KEYS))}")
        kwargs[key] = _decode(key, value)
    if "k" in kwargs and "active_set" not in kwargs:
        kwargs["active_set"] = None
    return ScenarioConfig(**kwargs)


def parse_values(text, axis):
    """Comma list ``a,b,c`` or inclusive range ``start:stop:step``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError("need step > 0 and stop >= start")
            count = math.floor((stop - start) / step + 1e-9)
            values = [round(start + i * step, 12) for i in range(count + 1)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as err:
        raise ValueError(f"cannot parse --values {text!r}: {err}") from None
    if not values:
        raise ValueError("--values is empty")
    if axis == "k":
        for v in values:
            if v != int(v):
                raise ValueError(f"invalid k value {v!r}: must be an integer")
        values = [int(v) for v in values]
    return values


def _resolve_config(args):
    cfg = parse_config(args.config, args.set or ())
    seed = args.seed
    if seed is None and os.environ.get("HRRIS_SEED"):
        try:
            seed = int(os.environ["HRRIS_SEED"])
        except ValueError:
            raise ConfigError("HRRIS_SEED", f"not an integer: {os.environ['HRRIS_SEED']!r}") from None
    updates = {}
    if seed is not None:
        updates["seed"] = seed
    if args.trials is not None:
        updates["trials"] = args.trials
    return replace(cfg, **updates) if updates else cfg


def _fmt_row(method, stats):
    return f"{method:<11s} mean_se={stats.mean_se:.6f} std_se={stats.std_se:.6f} bits/s/Hz"


def cmd_run(args):
    cfg = _resolve_config(args)
    rows = []
    for method in METHODS:
        stats = run_monte_carlo(cfg, method, workers=args.threads)
        rows.append(SweepRow("p_bs_dbm", cfg.p_bs_dbm, method, stats, cfg.trials, cfg.seed))
        print(_fmt_row(method, stats))
    if args.out:
        write_results(rows, args.out)
    return 0


def cmd_sweep(args):
    if args.axis not in AXES:
        raise ValueError(f"unknown axis {args.axis!r}; valid axes: {', '.join(AXES)}")
    cfg = _resolve_config(args)
    values = parse_values(args.values, args.axis)
    rows = sweep(cfg, args.axis, values, workers=args.threads)
    print(f"{'axis':<12s} {'value':>10s} {'method':<11s} {'mean_se':>10s} {'std_se':>10s}")
    for r in rows:
        print(f"{r.axis:<12s} {r.value:>10.6g} {r.method:<11s} {r.stats.mean_se:>10.6f} {r.stats.std_se:>10.6f}")
    if args.out:
        write_results(rows, args.out)
    return 0


def cmd_validate(args):
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("HRRIS_SEED", "0"))
    ok = True
    for name, suite in checks.SUITES.items():
        failures = suite(seed, args.quick)
        print(f"{'PASS' if not failures else 'FAIL'} {name}")
        if failures:
            ok = False
            for msg in failures:
                print(f"  {name}: {msg}", file=sys.stderr)
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="hrris", description="HR-RIS spectral-efficiency simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="JSON scenario file (defaults if omitted)")
        p.add_argument("--set", metavar="KEY=VALUE", action="append", help="override a config key")
        p.add_argument("--out", metavar="PATH", help="write results CSV here")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--threads", type=int, default=1, help="worker processes for trials")

    p_run = sub.add_parser("run", help="Monte Carlo comparison at one operating point")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, help=f"one of {', '.join(AXES)}")
    p_sweep.add_argument("--values", required=True, help="a,b,c or start:stop:step")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run randomized invariant suites")
    p_val.add_argument("--seed", type=int)
    p_val.add_argument("--quick", action="store_true", help="reduced instance counts")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, ArithmeticError) as err:
        print(f"hrris {args.command}: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
