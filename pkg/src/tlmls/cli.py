"""Command line interface.

Exit codes: 0 pass, 1 verification or numerical failure, 2 usage or input error.
"""
import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, check_tolerance, load_config, parse_config, parse_lambda
from .frame import ClosednessError, DriftError
from .pipeline import (InputError, cmd_build, cmd_classify_realform, cmd_example, cmd_solve,
                       verify_dir, write_json)
from .tzitzeica import BlowUpError

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _lambda_list(text):
    try:
        values = [complex(s.strip().replace(" ", "")) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse lambda list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty lambda list")
    try:
        return [parse_lambda([v.real, v.imag], "--lambda") for v in values]
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tol(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("--tol expects name=value")
    try:
        return name, check_tolerance(name, float(value))
    except (ValueError, ConfigError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    p = argparse.ArgumentParser(prog="tlmls", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="JSON run configuration")
            sp.add_argument("--grid", type=int, help="override Nu = Nv = GRID")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--tol", type=_tol, action="append", default=[], metavar="NAME=VAL")

    common(sub.add_parser("solve", help="solve the Goursat problem, write omega.csv"))
    b = sub.add_parser("build", help="integrate frames and export surfaces per lambda")
    common(b)
    b.add_argument("--lambda", dest="lambdas", type=_lambda_list,
                   help="comma-separated list, e.g. 1,0.7,0.6+0.8j")
    b.add_argument("--obj", action="store_true", help="also write OBJ meshes of the chart")
    v = sub.add_parser("verify", help="check built artifacts and write report.json")
    v.add_argument("dir", nargs="?", help="build directory (default: --out)")
    common(v, config=False)
    c = sub.add_parser("classify-realform", help="automorphism and real form identities")
    common(c, config=False)
    e = sub.add_parser("example", help="reproduce a closed-form example with oracle diff")
    e.add_argument("name", help="rp or clifford")
    e.add_argument("--grid", type=int, help="intervals per axis")
    common(e, config=False)
    return p


def _config(args):
    cfg = load_config(args.config)
    if args.grid is not None or args.tol:
        raw = cfg.to_json()
        if args.grid is not None:
            raw["grid"] = {"Nu": args.grid, "Nv": args.grid}
            if isinstance(raw["boundary"], dict):
                raise ConfigError("--grid cannot resample inline boundary arrays")
        raw["tolerances"].update(dict(args.tol))
        cfg = parse_config(raw)
    return cfg


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def run(args):
    if args.command == "solve":
        cfg = _config(args)
        _, report = cmd_solve(cfg, args.out or cfg.outputs)
        _emit(report)
        return EXIT_PASS if report["residual"] <= cfg.tolerances["tzitzeica"] else EXIT_FAIL
    if args.command == "build":
        cfg = _config(args)
        _, frames = cmd_build(cfg, args.out or cfg.outputs, args.lambdas, args.obj)
        _emit({"frames": [{"lambda": [f.lam.real, f.lam.imag], "max_drift": f.max_drift}
                          for f in frames]})
        return EXIT_PASS
    if args.command == "verify":
        target = args.dir or args.out
        if target is None:
            raise InputError("verify needs a build directory")
        report = verify_dir(target, dict(args.tol))
        failed = sorted(k for k, c in report["checks"].items() if not c["pass"])
        _emit({"overall": report["overall"], "failed": failed})
        return EXIT_PASS if report["overall"] else EXIT_FAIL
    if args.command == "classify-realform":
        table = cmd_classify_realform()
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            write_json(Path(args.out) / "realform.json", table)
        _emit(table)
        return EXIT_PASS if table["pass"] else EXIT_FAIL
    if args.command == "example":
        if args.name not in ("rp", "clifford"):
            raise ConfigError(f"unknown example {args.name!r}; choose rp or clifford")
        passed, diff, report = cmd_example(args.name, args.out or f"out_{args.name}", args.grid)
        failed = sorted(k for k, c in report["checks"].items() if not c["pass"])
        _emit({"pass": passed, "diff": diff, "failed_checks": failed})
        return EXIT_PASS if passed else EXIT_FAIL
    raise AssertionError(args.command)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except (ConfigError, InputError) as exc:
        print(f"tlmls: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BlowUpError, DriftError, ClosednessError) as exc:
        print(f"tlmls: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
