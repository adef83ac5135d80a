"""Command-line interface: ``mimo-gdof {eval,curve,plan,check-mac,ais}``.

Exit codes: 0 success, 1 domain or I/O error, 2 usage or parse error,
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .ais import AisExperimentConfig, run_experiment
from .exceptions import BudgetExceeded, DomainError, NotCovered, PreconditionError
from .gdof import BOUND_NAMES, GdofParams, sum_gdof
from .mac import MacProblem, check_achievable
from .planner import plan_for, validate

CSV_SCHEMA = 1
CSV_COLUMNS = ("alpha", "sum_gdof", "active_branch") + BOUND_NAMES

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class ParseError(Exception):
    pass


def _fmt(x):
    return "" if x is None else repr(float(x))


def alpha_grid(start, stop, step):
    """Inclusive grid ``start, start+step, ..., <= stop`` without float drift."""
    if not step > 0:
        raise DomainError(f"alpha step must be > 0, got {step}")
    if start > stop:
        raise DomainError(f"alpha start {start} exceeds stop {stop}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def curve_rows(K, M, N, alphas):
    rows = []
    for a in alphas:
        r = sum_gdof(GdofParams(K, M, N, a))
        rows.append([a, r.sum_gdof, r.active_branch.value] + [r.per_bound_values[b] for b in BOUND_NAMES])
    return rows


def render_curve(K, M, N, alphas, fmt):
    rows = curve_rows(K, M, N, alphas)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# schema={CSV_SCHEMA} K={K} M={M} N={N}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[0]), _fmt(row[1]), row[2]] + [_fmt(v) for v in row[3:]])
        return buf.getvalue()
    doc = {"schema": CSV_SCHEMA, "K": K, "M": M, "N": N,
           "rows": [dict(zip(CSV_COLUMNS, row)) for row in rows]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e


def cmd_eval(args):
    r = sum_gdof(GdofParams(args.K, args.M, args.N, args.alpha))
    if args.format == "json":
        doc = {"K": args.K, "M": args.M, "N": args.N, "alpha": args.alpha,
               "sum_gdof": r.sum_gdof, "active_branch": r.active_branch.value,
               "bounds": r.per_bound_values}
        _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    lines = [f"sum_gdof      {r.sum_gdof!r}", f"active_branch {r.active_branch.value}"]
    for name in BOUND_NAMES:
        v = r.per_bound_values[name]
        lines.append(f"{name:<13} {'n/a' if v is None else repr(v)}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_curve(args):
    alphas = alpha_grid(args.alpha_start, args.alpha_stop, args.alpha_step)
    GdofParams(args.K, args.M, args.N, alphas[0])
    _write(render_curve(args.K, args.M, args.N, alphas, args.format), args.out)
    return EXIT_OK


def cmd_plan(args):
    p = GdofParams(args.K, args.M, args.N, args.alpha)
    sp = plan_for(p)
    v = validate(sp, p)
    doc = sp.to_dict()
    doc["validation"] = v.to_dict()
    _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if v.match else EXIT_ERROR


def cmd_check_mac(args):
    raw = _load_json(args.problem)
    try:
        problem = MacProblem.from_dict(raw)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{args.problem}: bad MAC problem: {e}") from e
    raw_d = _load_json(args.tuple)
    d = raw_d["d"] if isinstance(raw_d, dict) and "d" in raw_d else raw_d
    if not isinstance(d, list) or not all(isinstance(x, (int, float)) for x in d):
        raise ParseError(f"{args.tuple}: expected a list of numbers or {{\"d\": [...]}}")
    v = check_achievable(problem, d)
    _write(v.dumps(), args.out)
    return EXIT_OK


def cmd_ais(args):
    raw = _load_json(args.config)
    try:
        cfg = AisExperimentConfig.from_dict(raw)
    except (KeyError, TypeError) as e:
        raise ParseError(f"{args.config}: bad experiment config: {e}") from e
    if args.seed is not None:
        cfg.seed = args.seed
    if args.budget is not None:
        cfg.budget = args.budget
    report = run_experiment(cfg, pair_budget=args.pairs, draws=args.draws)
    _write(report.dumps(), args.out)
    return EXIT_OK


def _add_channel_flags(p, alpha=True):
    p.add_argument("-K", type=int, required=True, help="number of users")
    p.add_argument("-M", type=int, required=True, help="transmit antennas per user")
    p.add_argument("-N", type=int, required=True, help="receive antennas per user")
    if alpha:
        p.add_argument("-a", "--alpha", type=float, required=True, help="cross-link exponent")


def build_parser():
    parser = argparse.ArgumentParser(prog="mimo-gdof", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="sum GDoF, active branch and bound table")
    _add_channel_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("curve", help="sweep alpha and write the sum-GDoF curve")
    _add_channel_flags(p, alpha=False)
    p.add_argument("--alpha-start", type=float, default=0.0)
    p.add_argument("--alpha-stop", type=float, default=3.0)
    p.add_argument("--alpha-step", type=float, default=0.01)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("plan", help="emit and validate the achievability plan")
    _add_channel_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("check-mac", help="check a GDoF tuple against a MAC problem")
    p.add_argument("--problem", required=True, help="JSON MAC problem file")
    p.add_argument("--tuple", required=True, help="JSON GDoF tuple file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_check_mac)

    p = sub.add_parser("ais", help="run an aligned-image-sets experiment")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--pairs", type=int, default=0, help="input pairs for the alignment check")
    p.add_argument("--draws", type=int, default=10_000, help="channel draws per pair")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ais)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (DomainError, NotCovered, PreconditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
