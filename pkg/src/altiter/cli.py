"""Command line interface.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage,
configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, catalog, load_document, parse_config
from .errors import AltIterError
from .harness import RunError, emit_csv, emit_json, run_experiment

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _add_common(p):
    p.add_argument("config", help="experiment configuration (JSON)")
    p.add_argument("--seed", type=int, help="seed for sampled checks")
    p.add_argument("--tol-euclid", type=float, help="domination/coupling tolerance in Euclidean spaces")
    p.add_argument("--tol-hyp", type=float, help="domination/coupling tolerance in the disk")
    p.add_argument("--horizon", type=int, help="number of iteration steps N")
    p.add_argument("--epsilon-grid", type=_float_list, help="comma separated, strictly decreasing")
    p.add_argument("--unsafe-skip-validation", action="store_true",
                   help="UNSAFE: accept maps that fail construction checks (failure-path testing only)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="altiter",
        description="Alternative and Halpern iterations for nonexpansive maps: run and verify experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment and write result JSON and series CSV")
    _add_common(p)
    p.add_argument("--out-dir", help="directory for artifacts (created if missing)")
    p = sub.add_parser("verify", help="run an experiment and its checks without writing files")
    _add_common(p)
    p = sub.add_parser("sweep", help="run one configuration under several schedules")
    _add_common(p)
    p.add_argument("--schedules", required=True,
                   help="comma separated schedules, e.g. harmonic,power:0.75,constant:0.5")
    p = sub.add_parser("catalog", help="list spaces, maps, schedules and rate families")
    p.add_argument("--json", action="store_true", help="print the catalog as JSON")
    return parser


def _overrides(args):
    return {
        "seed": args.seed,
        "tol_euclid": args.tol_euclid,
        "tol_hyp": args.tol_hyp,
        "horizon": args.horizon,
        "epsilon_grid": args.epsilon_grid,
        "unsafe": args.unsafe_skip_validation,
    }


def _read_config(path):
    try:
        return load_document(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc


def _fmt(v):
    return "-" if v is None else f"{v:.3e}"


def _describe(name, report):
    if name == "coupling":
        devs = ", ".join(f"{k}={report[k]['max_deviation']:.2e}"
                         for k in ("mapping_identity", "halpern_recurrence", "independent_halpern"))
        return f"{devs}, bitwise={report['bitwise']}"
    if name == "domination":
        return (f"pairs={report['pairs_checked']} max_excess={report['pair_max_excess']:.2e}, "
                f"fixed_point_max_excess={_fmt(report['fixed_point_max_excess'])}")
    if name == "rate_transfer":
        bad = [e["epsilon"] for e in report["entries"] if not e["ok"]]
        return f"max_excess={report['max_excess']:.2e} violations={report['violations']} rate_failures={bad}"
    if name == "nonexpansive":
        return f"max_ratio={report['max_ratio']:.9f} pairs={report['pairs_checked']}"
    if name == "convergence":
        return (f"delta={report['delta']:g} settle x={report['x_settle']} y={report['y_settle']} "
                f"final x={report['final_x']:.3e} y={report['final_y']:.3e}")
    return ""


def _print_summary(result, out):
    for name, report in result.checks.items():
        status = "pass" if report["passed"] else "FAIL"
        print(f"{name:<14} {status}  {_describe(name, report)}", file=out)
    horizon = result.summary["horizon"]
    print(f"verdict: {'pass' if result.verdict else 'FAIL'} (horizon {horizon})", file=out)


def _cmd_run(args, out, write):
    cfg = parse_config(_read_config(args.config), **_overrides(args))
    result = run_experiment(cfg)
    _print_summary(result, out)
    if write:
        out_dir = Path(args.out_dir or cfg.output["dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        emit_json(result, out_dir / cfg.output["json"])
        emit_csv(result, out_dir / cfg.output["csv"])
        print(f"wrote {out_dir / cfg.output['json']} and {out_dir / cfg.output['csv']}", file=out)
    return EXIT_PASS if result.verdict else EXIT_FAIL


def _cmd_sweep(args, out):
    doc = _read_config(args.config)
    schedules = [s.strip() for s in args.schedules.split(",") if s.strip()]
    if not schedules:
        raise ConfigError("--schedules: no schedule given")
    rows = []
    for sched in schedules:
        cfg = parse_config(doc, schedule=sched, **_overrides(args))
        res = run_experiment(cfg)
        s = res.summary
        rows.append((sched, res.verdict, s.get("final_x_distance_to_p"), s.get("final_y_distance_to_p"),
                     s["final_x_step"]))
    print(f"{'schedule':<20} {'verdict':<8} {'d(x_N,p)':>12} {'d(y_N,p)':>12} {'d(x_N-1,x_N)':>13}", file=out)
    for sched, ok, dx, dy, step in rows:
        print(f"{sched:<20} {'pass' if ok else 'FAIL':<8} {_fmt(dx):>12} {_fmt(dy):>12} {_fmt(step):>13}",
              file=out)
    return EXIT_PASS if all(r[1] for r in rows) else EXIT_FAIL


def _cmd_catalog(args, out):
    cat = catalog()
    if args.json:
        print(json.dumps(cat, indent=2), file=out)
        return EXIT_PASS
    for section, entries in cat.items():
        print(f"{section}:", file=out)
        if isinstance(entries, dict):
            for name, params in entries.items():
                print(f"  {name:<22} {params}", file=out)
        else:
            print("  " + ", ".join(entries), file=out)
    return EXIT_PASS


def cli_main(argv=None, out=None, err=None):
    """Entry point; returns the exit status instead of exiting."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        if args.command == "catalog":
            return _cmd_catalog(args, out)
        if args.command == "sweep":
            return _cmd_sweep(args, out)
        return _cmd_run(args, out, write=args.command == "run")
    except (ConfigError, RunError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot write artifacts: {exc}", file=err)
        return EXIT_USAGE
    except AltIterError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main():
    sys.exit(cli_main())
