"""Command-line front end: keyrate | curve | distance | simulate.

Configuration is a flat JSON object; every key can be overridden by the
command-line flag of the same name, and flags win.  JSON reports embed the
fully resolved configuration (execution details like --workers and --out are
not part of it), so re-running from an echoed configuration reproduces the
output bit for bit.  Exit codes: 0 success, 2 invalid configuration,
1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adversary import STRATEGY_KINDS, EveStrategy
from .mcharness import analytic_expectations, run_experiment
from .optimize import curve, optimize_mu, secure_distance
from .rates import SystemParams, key_rate

PROTOCOL_CHOICES = ("bb84", "qutrit", "both")

DEFAULTS = {
    "protocol": "both",
    "alpha_db_per_km": 0.2,
    "length_km": 20.0,
    "gamma_b": 0.5,
    "eta": 0.1,
    "p_d": 1e-5,
    "q_opt": 0.005,
    "mu": 0.1,
    "l_from": 0.0,
    "l_to": 80.0,
    "l_step": 1.0,
    "strategy": "none",
    "epsilon1": 0.25,
    "rounds": 100_000,
    "seed": 12345,
    "workers": 1,
    "format": None,
    "out": None,
}

PARAM_KEYS = ("alpha_db_per_km", "length_km", "gamma_b", "eta", "p_d", "q_opt", "mu")
#: Keys echoed into reports; workers and out are execution details, not config.
ECHO_KEYS = (
    "protocol", *PARAM_KEYS, "l_from", "l_to", "l_step",
    "strategy", "epsilon1", "rounds", "seed",
)


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qutrit-qkd",
        description="Key rates, secure distances, and Monte Carlo checks for "
        "the qutrit-subspace QKD scheme and its qubit baseline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("keyrate", "analytic key-rate breakdown at one operating point"),
        ("curve", "optimized key rate versus distance (plot-ready CSV)"),
        ("distance", "secure transmission distance per protocol"),
        ("simulate", "Monte Carlo round simulation with optional eavesdropper"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="flat JSON config file")
        p.add_argument("--protocol", choices=PROTOCOL_CHOICES, default=None)
        p.add_argument("--alpha-db-per-km", dest="alpha_db_per_km", type=float, default=None)
        p.add_argument("--length-km", dest="length_km", type=float, default=None)
        p.add_argument("--gamma-b", dest="gamma_b", type=float, default=None)
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--pd", dest="p_d", type=float, default=None)
        p.add_argument("--q-opt", dest="q_opt", type=float, default=None)
        p.add_argument("--mu", type=float, default=None)
        p.add_argument("--l-from", dest="l_from", type=float, default=None)
        p.add_argument("--l-to", dest="l_to", type=float, default=None)
        p.add_argument("--l-step", dest="l_step", type=float, default=None)
        p.add_argument("--strategy", choices=STRATEGY_KINDS, default=None)
        p.add_argument("--epsilon1", type=float, default=None)
        p.add_argument("--rounds", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--out", type=str, default=None, help="output path; default stdout")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit flags; strict key checking."""
    cfg = dict(DEFAULTS)
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a flat JSON object")
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if cfg["protocol"] not in PROTOCOL_CHOICES:
        raise ConfigError(f"invalid protocol: {cfg['protocol']!r}")
    if cfg["strategy"] not in STRATEGY_KINDS:
        raise ConfigError(f"invalid strategy: {cfg['strategy']!r}")
    try:
        _params_from(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not 0.0 <= float(cfg["epsilon1"]) <= 0.5:
        raise ConfigError(f"invalid epsilon1: {cfg['epsilon1']!r}")
    if int(cfg["rounds"]) < 1:
        raise ConfigError(f"invalid rounds: {cfg['rounds']!r}")
    if int(cfg["workers"]) < 1:
        raise ConfigError(f"invalid workers: {cfg['workers']!r}")
    if float(cfg["l_step"]) <= 0.0:
        raise ConfigError(f"invalid l_step: {cfg['l_step']!r}")
    if float(cfg["l_from"]) < 0.0 or float(cfg["l_to"]) < float(cfg["l_from"]):
        raise ConfigError(f"invalid distance grid: {cfg['l_from']!r}..{cfg['l_to']!r}")
    if cfg["format"] not in (None, "csv", "json"):
        raise ConfigError(f"invalid format: {cfg['format']!r}")


def _params_from(cfg: dict) -> SystemParams:
    return SystemParams(**{k: float(cfg[k]) for k in PARAM_KEYS})


def _protocols(cfg: dict) -> list[str]:
    return ["bb84", "qutrit"] if cfg["protocol"] == "both" else [cfg["protocol"]]


def _echo(cfg: dict) -> dict:
    return {k: cfg[k] for k in ECHO_KEYS}


def _emit(text: str, cfg: dict) -> None:
    out = cfg.get("out")
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(payload: dict, cfg: dict) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", cfg)


def _fmt10(x: float) -> str:
    return format(x, ".10g")


def cmd_keyrate(cfg: dict) -> int:
    params = _params_from(cfg)
    results = [key_rate(proto, params).as_dict() for proto in _protocols(cfg)]
    if cfg["format"] == "csv":
        cols = list(results[0].keys())
        lines = [",".join(cols)]
        for row in results:
            lines.append(",".join(
                row["protocol"] if c == "protocol" else _fmt10(row[c]) for c in cols
            ))
        _emit("\n".join(lines) + "\n", cfg)
    else:
        _emit_json({"config": _echo(cfg), "results": results}, cfg)
    return 0


def _l_grid(cfg: dict) -> list[float]:
    start, stop, step = float(cfg["l_from"]), float(cfg["l_to"]), float(cfg["l_step"])
    n = int((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(n)]


def cmd_curve(cfg: dict) -> int:
    params = _params_from(cfg)
    grid = _l_grid(cfg)
    per_protocol = {
        proto: curve(proto, params, grid, workers=int(cfg["workers"]))
        for proto in _protocols(cfg)
    }
    rows = []
    for i, length in enumerate(grid):
        for proto in _protocols(cfg):
            point = per_protocol[proto][i]
            rows.append((length, proto, point.mu_opt, point.k_opt))
    if cfg["format"] == "json":
        results = [
            {"length_km": l, "protocol": p, "mu_opt": m, "key_rate": k}
            for (l, p, m, k) in rows
        ]
        _emit_json({"config": _echo(cfg), "results": results}, cfg)
    else:
        lines = ["length_km,protocol,mu_opt,key_rate"]
        lines += [f"{_fmt10(l)},{p},{_fmt10(m)},{_fmt10(k)}" for (l, p, m, k) in rows]
        _emit("\n".join(lines) + "\n", cfg)
    return 0


def cmd_distance(cfg: dict) -> int:
    params = _params_from(cfg)
    results = []
    for proto in _protocols(cfg):
        d = secure_distance(proto, params)
        mu_at = optimize_mu(proto, params, max(d - 1.0, 0.0)).mu_opt if d > 0 else None
        results.append(
            {"protocol": proto, "secure_distance_km": d, "mu_at_cutoff_minus_1km": mu_at}
        )
    _emit_json({"config": _echo(cfg), "results": results}, cfg)
    return 0


def cmd_simulate(cfg: dict) -> int:
    if cfg["protocol"] == "both":
        raise ConfigError("simulate needs a single protocol (bb84 or qutrit)")
    params = _params_from(cfg)
    strategy = EveStrategy(cfg["strategy"], float(cfg["epsilon1"]))
    try:
        report = run_experiment(
            cfg["protocol"],
            strategy,
            params,
            int(cfg["rounds"]),
            int(cfg["seed"]),
            workers=int(cfg["workers"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = {
        "config": _echo(cfg),
        "report": report.as_dict(),
        "analytic": analytic_expectations(params),
    }
    _emit_json(payload, cfg)
    return 0


_COMMANDS = {
    "keyrate": cmd_keyrate,
    "curve": cmd_curve,
    "distance": cmd_distance,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
