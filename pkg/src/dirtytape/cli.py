"""Command-line front end: figure data sweeps and verification runs.

Exit status: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, is_dataclass

import numpy as np

from . import __version__
from . import mac_regions as mr
from . import suites
from .errors import DirtyTapeError, ParameterError
from .rate_core import SingleUserParams, c1, c3, to_unit, trivial_upper
from .timeshare import DEFAULT_ROUNDS, c2, c4

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

DEFAULTS = {
    "single-user": {"ps": 100.0, "pz": 1.0, "p": None, "p_min": 1e-2, "p_max": 1e5, "points": 120, "grid": 101},
    "mac-dtc": {"p1": 200.0, "p2": 100.0, "ps": None, "pz": 1.0, "grid": 201, "r1_points": 1001},
    "jdpt": {
        "p1": 200.0, "p2": 100.0, "ps": None, "pz": 1.0, "grid": 201, "r1_points": 1001,
        "alpha_bracket": "-1:2", "alpha_points": 301,
    },
    "verify": {"seed": 0, "draws": 1000, "trials": 10_000, "mc_samples": 1_000_000},
}
COMMON = {"units": "bits", "format": "csv", "out": None}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """12 significant digits, stable across platforms."""
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{float(x):.12g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        return float(fmt(x)) if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def render(meta: dict, columns: list, rows: list, kind: str) -> str:
    if kind == "csv":
        buf = io.StringIO()
        for k, v in meta.items():
            buf.write(f"# {k}: {v}\n")
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(fmt(v) for v in r) + "\n")
        return buf.getvalue()
    if kind == "json":
        doc = {
            "meta": {k: _json_value(v) for k, v in meta.items()},
            "rows": [{c: _json_value(v) for c, v in zip(columns, r)} for r in rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    raise UsageError(f"unknown format {kind!r}")


def _meta(cmd: str, cfg: dict, **extra) -> dict:
    meta = {"generator": f"dirtytape {__version__}", "command": cmd}
    for k in sorted(cfg):
        if k not in ("out", "config", "command") and cfg[k] is not None:
            meta[k] = cfg[k]
    meta.update(extra)
    return meta


def _unit(cfg):
    if cfg["units"] not in ("bits", "nats"):
        raise UsageError(f"--units must be bits or nats, got {cfg['units']!r}")
    return lambda v: to_unit(v, cfg["units"])


def _powers(cfg) -> list:
    if cfg.get("p") is not None:
        raw = cfg["p"]
        vals = raw if isinstance(raw, list) else [float(t) for t in str(raw).split(",") if t.strip()]
        return [float(v) for v in vals]
    lo, hi, n = float(cfg["p_min"]), float(cfg["p_max"]), int(cfg["points"])
    if not (0 < lo <= hi) or n < 1:
        raise UsageError("sweep needs 0 < p_min <= p_max and points >= 1")
    return [float(v) for v in np.geomspace(lo, hi, n)]


def cmd_single_user(cfg: dict):
    unit = _unit(cfg)
    grid = int(cfg["grid"])
    powers = _powers(cfg)
    base = SingleUserParams(0.0, float(cfg["ps"]), float(cfg["pz"]))
    rows = []
    for p in powers:
        sp = base.with_power(p)
        snr = 10 * math.log10(p / sp.pz) if p > 0 else -math.inf
        rates = [c1(sp), c2(sp, grid).rate, c3(sp), c4(sp, grid).rate, trivial_upper(sp)]
        rows.append([p, snr] + [unit(v) for v in rates])
    shown = {k: v for k, v in cfg.items() if cfg.get("p") is None or k not in ("p_min", "p_max", "points")}
    meta = _meta("single-user", shown, rounds=DEFAULT_ROUNDS)
    return meta, ["p", "snr_db", "c1", "c2", "c3", "c4", "upper"], rows


def _mac_params(cfg) -> mr.MacParams:
    if cfg.get("ps") is None:
        raise UsageError("--ps is required for region commands")
    return mr.MacParams(float(cfg["p1"]), float(cfg["p2"]), float(cfg["ps"]), float(cfg["pz"]))


def _region_rows(frontier, outer, unit):
    rows = [["inner", unit(a), unit(b)] for a, b in zip(frontier.r1, frontier.r2)]
    rows += [["outer", unit(a), unit(b)] for a, b in zip(outer.r1, outer.r2)]
    return rows


def cmd_mac_dtc(cfg: dict):
    unit = _unit(cfg)
    params = _mac_params(cfg)
    grid = mr.outer_r1_grid(params, int(cfg["r1_points"]))
    fr = mr.mac_dtc_frontier(params, int(cfg["grid"]), r1_grid=grid)
    outer = mr.outer_frontier(params, grid)
    return _meta("mac-dtc", cfg), ["curve", "r1", "r2"], _region_rows(fr, outer, unit)


def parse_bracket(text) -> tuple:
    if isinstance(text, (list, tuple)):
        lo, hi = text
    else:
        try:
            lo, hi = str(text).split(":")
        except ValueError:
            raise UsageError(f"--alpha-bracket expects lo:hi, got {text!r}") from None
    try:
        return float(lo), float(hi)
    except ValueError:
        raise UsageError(f"--alpha-bracket expects numbers, got {text!r}") from None


def cmd_jdpt(cfg: dict):
    unit = _unit(cfg)
    params = _mac_params(cfg)
    grid = mr.outer_r1_grid(params, int(cfg["r1_points"]))
    fr = mr.jdpt_frontier(
        params, int(cfg["alpha_points"]), int(cfg["grid"]), parse_bracket(cfg["alpha_bracket"]), r1_grid=grid
    )
    outer = mr.outer_frontier(params, grid)
    meta = _meta("jdpt", cfg, **fr.info)
    return meta, ["curve", "r1", "r2"], _region_rows(fr, outer, unit)


def _plain(x):
    if is_dataclass(x):
        return {k: _plain(v) for k, v in asdict(x).items()}
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (float, np.floating)):
        return fmt(x)
    return x


def cmd_verify(cfg: dict):
    results = suites.run_all(
        seed=int(cfg["seed"]), draws=int(cfg["draws"]), trials=int(cfg["trials"]), mc_samples=int(cfg["mc_samples"])
    )
    rows = [
        [r.name, "pass" if r.passed else "FAIL", r.worst, json.dumps(_plain(r.detail), sort_keys=True)]
        for r in results
    ]
    # oracle discrepancies are always reported in nats
    shown = {k: v for k, v in cfg.items() if k != "units"}
    meta = _meta("verify", shown, values="nats", all_passed=all(r.passed for r in results))
    return meta, ["check", "status", "worst", "detail"], rows


COMMANDS = {
    "single-user": cmd_single_user,
    "mac-dtc": cmd_mac_dtc,
    "jdpt": cmd_jdpt,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dirtytape", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"dirtytape {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shared(sp):
        sp.add_argument("--units", choices=["bits", "nats"], default=None)
        sp.add_argument("--format", choices=["csv", "json"], default=None)
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--config", default=None, help="JSON file of option values; flags override it")
        sp.add_argument("--seed", type=int, default=None)

    def powers(sp, *names):
        for n in names:
            sp.add_argument(f"--{n}", type=float, default=None)

    sp = sub.add_parser("single-user", help="C1..C4 and the upper bound versus power")
    shared(sp)
    powers(sp, "ps", "pz", "p-min", "p-max")
    sp.add_argument("--p", default=None, help="comma-separated powers (overrides the sweep)")
    sp.add_argument("--points", type=int, default=None)
    sp.add_argument("--grid", type=int, default=None, help="time-sharing grid points per axis")

    for name, text in (("mac-dtc", "MAC dirty tape region boundary"), ("jdpt", "joint dirty paper/tape region boundary")):
        sp = sub.add_parser(name, help=text)
        shared(sp)
        powers(sp, "p1", "p2", "ps", "pz")
        sp.add_argument("--grid", type=int, default=None, help="beta grid points per axis")
        sp.add_argument("--r1-points", type=int, default=None)
        if name == "jdpt":
            sp.add_argument("--alpha-bracket", default=None, help="lo:hi (write --alpha-bracket=-1:2)")
            sp.add_argument("--alpha-points", type=int, default=None)

    sp = sub.add_parser("verify", help="closed form vs oracle checks")
    shared(sp)
    sp.add_argument("--draws", type=int, default=None)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--mc-samples", type=int, default=None)
    return ap


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(COMMON)
    cfg.update(DEFAULTS[args.command])
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad JSON in {args.config}: {exc}") from None
        for k, v in loaded.items():
            key = k.replace("-", "_")
            if key not in cfg and key != "seed":
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            cfg[key] = v
    for k, v in vars(args).items():
        if k in ("command", "config") or v is None:
            continue
        cfg[k] = v
    if args.command != "verify":
        cfg.pop("seed", None)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg["format"] not in ("csv", "json"):
            raise UsageError(f"--format must be csv or json, got {cfg['format']!r}")
        meta, columns, rows = COMMANDS[args.command](cfg)
        text = render(meta, columns, rows, cfg["format"])
    except (UsageError, ParameterError, ValueError, TypeError) as exc:
        print(f"dirtytape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DirtyTapeError as exc:
        print(f"dirtytape: numerical failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY

    try:
        if cfg["out"]:
            with open(cfg["out"], "w", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"dirtytape: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO

    if args.command == "verify" and not meta["all_passed"]:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
