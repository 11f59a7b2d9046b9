"""``nlamp`` command line: parameter scans and invariant suites.

Exit codes: 0 success, 1 an invariant or oracle check failed, 2 bad input
(invalid config, unphysical regime, unfaithful cutoff).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__, scan, verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _parser():
    parser = argparse.ArgumentParser(prog="nlamp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nlamp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="sweep one parameter and write CSV")
    p.add_argument("config", nargs="?", help="JSON config file (omit to build one from --set)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry; dotted keys such as fixed.eta or sweep.steps")
    p.add_argument("-o", "--output", help="CSV path ('-' for stdout)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--cutoff", type=int, help="Fock cutoff (per mode for the experiment)")
    p.add_argument("--no-oracle", action="store_true", help="skip the Fock cross-check")

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=[*verify.SUITES, "all"])
    v.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    v.add_argument("--json", dest="json_path", help="also write the report(s) here")
    return parser


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise scan.ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise scan.ConfigError(f"{path}: invalid JSON ({exc})") from None


def _scan(args):
    raw = _load(args.config) if args.config else {}
    raw = scan.apply_overrides(raw, args.overrides)
    for key in ("output", "workers", "cutoff"):
        if getattr(args, key) is not None:
            raw[key] = getattr(args, key)
    if args.no_oracle:
        raw["oracle"] = False
    config = scan.parse_config(raw)
    points, rows = scan.run_scan(config)
    text = scan.format_csv(config, points, rows)
    if config.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(config.output, "w", newline="") as fh:
            fh.write(text)
    worst = scan.worst_residual(rows)
    print(f"{len(rows)} rows, worst oracle residual {worst:.3e}", file=sys.stderr)
    if worst > verify.TOL_ORACLE:
        print(f"oracle residual exceeds {verify.TOL_ORACLE:g}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _verify(args):
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    reports = [verify.run_suite(n, seed=args.seed) for n in names]
    payload = [json.loads(r.to_json()) for r in reports]
    text = json.dumps(payload if len(payload) > 1 else payload[0], indent=2, sort_keys=True)
    print(text)
    if args.json_path:
        with open(args.json_path, "w") as fh:
            fh.write(text + "\n")
    for r in reports:
        print(f"{r.suite}: {'pass' if r.passed else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return _scan(args) if args.command == "scan" else _verify(args)
    except (scan.ConfigError, scan.ScanError) as exc:
        print(f"nlamp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
