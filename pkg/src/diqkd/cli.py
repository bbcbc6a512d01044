"""Command-line front end: rate, threshold, curve, and verify subcommands.

Configuration can come from a flat key = value file (one pair per line, #
comments) via --config; command-line flags override file values.  Records go
to stdout as JSON; the curve subcommand writes CSV.  Exit codes: 0 success,
1 numerical/runtime error, 2 configuration error, 3 verification failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from ._accel import NUMBA_ENABLED, set_threads
from .rates import (
    SOURCES,
    VARIANTS,
    OptimizerOptions,
    ProtocolSpec,
    optimize_rate,
    threshold_efficiency,
    rate_curve,
)
from .verify import SUITES, run_suites

CSV_HEADER = "eta,protocol,rate_raw,rate_clamped,S,ec_term,eve_term,p,g,gbar,N,alpha0,alpha1,alpha2,beta1,beta2"

_CONFIG_KEYS = {
    "protocol": str,
    "source": str,
    "eta": float,
    "eta_min": float,
    "eta_max": float,
    "eta_steps": int,
    "p": str,
    "n_max": int,
    "seed": int,
    "restarts": int,
    "out": str,
    "threads": int,
    "verbose": bool,
    "suite": str,
    "quick": bool,
}

_DEFAULTS = {
    "protocol": "noisy",
    "source": "spdc",
    "eta": 1.0,
    "eta_min": 0.8,
    "eta_max": 1.0,
    "eta_steps": 20,
    "p": None,
    "n_max": 8,
    "seed": 0,
    "restarts": 32,
    "out": "-",
    "threads": None,
    "verbose": False,
    "suite": "all",
    "quick": False,
}


class ConfigError(Exception):
    pass


def _parse_bool(raw, key):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"config key {key}: expected a boolean, got {raw!r}")


def read_config_file(path):
    """Parse a flat key = value config file into a dict."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line.rstrip()!r}")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        kind = _CONFIG_KEYS[key]
        try:
            if kind is bool:
                values[key] = _parse_bool(raw, key)
            else:
                values[key] = kind(raw)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {raw!r}") from exc
    return values


def _merge_config(args):
    """Defaults, then config file, then explicit flags."""
    cfg = dict(_DEFAULTS)
    if args.config:
        cfg.update(read_config_file(args.config))
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["threads"] is None and os.environ.get("DIQKD_THREADS"):
        try:
            cfg["threads"] = int(os.environ["DIQKD_THREADS"])
        except ValueError as exc:
            raise ConfigError(f"DIQKD_THREADS is not an integer: {os.environ['DIQKD_THREADS']!r}") from exc
    return cfg


def _parse_p(cfg):
    raw = cfg["p"]
    if raw is None:
        return None if cfg["protocol"] == "noisy" else 0.0
    if isinstance(raw, str) and raw.strip().lower() == "opt":
        if cfg["protocol"] != "noisy":
            raise ConfigError("p = opt is only meaningful for the noisy protocol")
        return None
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"p must be a number or 'opt', got {raw!r}") from exc


def _build_spec(cfg, protocol=None):
    protocol = protocol or cfg["protocol"]
    if protocol not in VARIANTS:
        raise ConfigError(f"unknown protocol {protocol!r}; expected one of {VARIANTS}")
    if cfg["source"] not in SOURCES:
        raise ConfigError(f"unknown source {cfg['source']!r}; expected one of {SOURCES}")
    try:
        return ProtocolSpec(variant=protocol, source=cfg["source"], p=_parse_p(cfg))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_opts(cfg):
    if cfg["restarts"] < 1:
        raise ConfigError(f"restarts must be positive, got {cfg['restarts']}")
    if cfg["n_max"] < 1:
        raise ConfigError(f"n_max must be positive, got {cfg['n_max']}")
    return OptimizerOptions(seed=cfg["seed"], restarts=cfg["restarts"], max_modes=cfg["n_max"])


def _point_record(point, source):
    rec = {
        "alpha0": point.settings[0].angle,
        "alpha1": point.settings[1].angle,
        "alpha2": point.settings[2].angle,
        "beta1": point.settings[3].angle,
        "beta2": point.settings[4].angle,
        "p": point.p,
    }
    if source == "spdc":
        rec.update(g=point.src.g, gbar=point.src.gbar, n_modes=point.src.n_modes)
    else:
        rec.update(theta=point.theta)
    return rec


def _rate_record(res, source):
    return {
        "eta": res.eta,
        "rate": res.rate,
        "rate_clamped": max(res.rate, 0.0),
        "S": res.chsh,
        "ec_term": res.ec_term,
        "eve_term": res.eve_term,
        "params": _point_record(res.point, source),
    }


def _echo_config(cfg):
    for key in sorted(cfg):
        print(f"# {key} = {cfg[key]}", file=sys.stderr)


def cmd_rate(cfg):
    if not 0.0 <= cfg["eta"] <= 1.0:
        raise ConfigError(f"eta must lie in [0, 1], got {cfg['eta']}")
    spec = _build_spec(cfg)
    res = optimize_rate(spec, cfg["eta"], _build_opts(cfg))
    record = {"command": "rate", "protocol": spec.variant, "source": spec.source}
    record.update(_rate_record(res, spec.source))
    print(json.dumps(record))
    return 0


def cmd_threshold(cfg):
    spec = _build_spec(cfg)
    try:
        thr = threshold_efficiency(spec, _build_opts(cfg))
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    record = {
        "command": "threshold",
        "protocol": spec.variant,
        "source": spec.source,
        "threshold_eta": thr.eta,
        "probes": len(thr.trace),
        "witness": _rate_record(thr.witness, spec.source),
    }
    print(json.dumps(record))
    if cfg["verbose"]:
        for eta, rate in thr.trace:
            print(f"# probe eta={eta:.6f} rate={rate:+.6e}", file=sys.stderr)
    return 0


def _csv_row(protocol, res, source):
    point = res.point
    if source == "spdc":
        g, gbar, n_modes = point.src.g, point.src.gbar, point.src.n_modes
    else:
        g, gbar, n_modes = point.theta, 0.0, 1
    fields = [res.eta, protocol, res.rate, max(res.rate, 0.0), res.chsh, res.ec_term,
              res.eve_term, point.p, g, gbar, n_modes] + [s.angle for s in point.settings]
    return ",".join(f"{f:.12g}" if isinstance(f, float) else str(f) for f in fields)


def cmd_curve(cfg):
    if not 0.0 <= cfg["eta_min"] <= cfg["eta_max"] <= 1.0:
        raise ConfigError(
            f"eta grid [{cfg['eta_min']}, {cfg['eta_max']}] must be ordered and lie in [0, 1]"
        )
    if cfg["eta_steps"] < 2:
        raise ConfigError(f"eta_steps must be at least 2, got {cfg['eta_steps']}")
    protocols = sorted(set(cfg["protocol"].split(",")))
    grid = np.linspace(cfg["eta_min"], cfg["eta_max"], cfg["eta_steps"])
    opts = _build_opts(cfg)
    lines = [CSV_HEADER]
    for protocol in protocols:
        spec = _build_spec(cfg, protocol=protocol)
        for res in rate_curve(spec, grid, opts):
            lines.append(_csv_row(protocol, res, spec.source))
    text = "\n".join(lines) + "\n"
    if cfg["out"] == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {cfg['out']}: {exc}", file=sys.stderr)
            return 1
    return 0


def cmd_verify(cfg):
    names = tuple(cfg["suite"].split(","))
    try:
        reports = run_suites(names, quick=cfg["quick"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    all_pass = True
    for rep in reports:
        print(rep.summary())
        for failure in rep.failures:
            print(f"    {failure}")
        all_pass &= rep.passed
    return 0 if all_pass else 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="diqkd",
        description="Key rates and security-bound checks for photonic device-independent QKD.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key = value configuration file")
        sp.add_argument("--protocol", help="|".join(VARIANTS) + " (curve accepts a comma list)")
        sp.add_argument("--source", help="|".join(SOURCES))
        sp.add_argument("--p", help="preprocessing probability, or 'opt' to optimize")
        sp.add_argument("--n-max", dest="n_max", type=int, help="largest mode-pair count to sweep")
        sp.add_argument("--seed", type=int, help="optimizer restart seed")
        sp.add_argument("--restarts", type=int, help="quasi-random restarts per grid point")
        sp.add_argument("--threads", type=int, help="worker threads (default: machine, or DIQKD_THREADS)")
        sp.add_argument("--verbose", action="store_const", const=True,
                        help="echo effective configuration and traces to stderr")

    sp = sub.add_parser("rate", help="optimized key rate at one efficiency")
    common(sp)
    sp.add_argument("--eta", type=float, help="global detection efficiency")
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("threshold", help="minimal efficiency with positive rate")
    common(sp)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("curve", help="optimized rate over an efficiency grid (CSV)")
    common(sp)
    sp.add_argument("--eta-min", dest="eta_min", type=float)
    sp.add_argument("--eta-max", dest="eta_max", type=float)
    sp.add_argument("--eta-steps", dest="eta_steps", type=int)
    sp.add_argument("--out", help="output CSV path, or - for stdout")
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("verify", help="run property suites against the bound and click model")
    common(sp)
    sp.add_argument("--suite", help="|".join(SUITES) + "|all (comma list accepted)")
    sp.add_argument("--quick", action="store_const", const=True,
                    help="smaller sample sizes for a fast smoke check")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        if cfg["threads"] is not None:
            if cfg["threads"] < 1:
                raise ConfigError(f"threads must be positive, got {cfg['threads']}")
            set_threads(cfg["threads"])
        if cfg["verbose"]:
            cfg_echo = dict(cfg, numba=NUMBA_ENABLED)
            _echo_config(cfg_echo)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
