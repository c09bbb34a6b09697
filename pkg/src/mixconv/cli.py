"""Command-line front end.

Exit codes: 0 success, 2 bad flags or parameters, 3 integrator failure,
4 critical-value search failure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import export
from .classify import classification_record, classify
from .errors import BracketFailure, IntegratorError, InvalidControls, InvalidParams, PreconditionError
from .ode import DEFAULT_CONTROLS, ProblemParams, integrate
from .shooting import SHOOTING_CONTROLS, find_c_star, find_c_upper, sweep
from .verify import SUITES, VERIFY_CONTROLS, run_suite

EXIT_FLAGS, EXIT_INTEGRATOR, EXIT_CRITICAL, EXIT_VERIFY = 2, 3, 4, 5

_FLOAT_KEYS = {"beta", "a", "b", "c", "c_min", "c_max", "tol", "t_max", "rtol", "atol"}
_INT_KEYS = {"n", "jobs"}
_BOOL_KEYS = {"monitors"}


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file; blank lines and ``#`` comments are ignored."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key in _INT_KEYS:
            values[key] = int(value)
        elif key in _BOOL_KEYS:
            values[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            values[key] = value
    return values


def _add_problem(p: argparse.ArgumentParser, with_c: bool) -> None:
    p.add_argument("--beta", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    if with_c:
        p.add_argument("--c", type=float)


def _add_controls(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-max", type=float, help="integration horizon")
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixconv", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="optional key = value file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)

    p = sub.add_parser("integrate", help="integrate one shot", parents=[common])
    _add_problem(p, True)
    _add_controls(p)
    p.add_argument("--monitors", action="store_true", default=None, help="append H,L,K columns")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("classify", help="classify one shot", parents=[common])
    _add_problem(p, True)
    _add_controls(p)
    p.add_argument("--out")

    p = sub.add_parser("critical", help="locate c_star or c_upper", parents=[common])
    _add_problem(p, False)
    p.add_argument("--which", choices=("cstar", "cupper"))
    p.add_argument("--tol", type=float)
    _add_controls(p)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="classify a uniform grid of shots", parents=[common])
    _add_problem(p, False)
    p.add_argument("--c-min", type=float)
    p.add_argument("--c-max", type=float)
    p.add_argument("--n", type=int)
    _add_controls(p)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("verify", help="run a regime verification suite", parents=[common])
    p.add_argument("--suite", choices=sorted(SUITES))
    _add_problem(p, False)
    _add_controls(p)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    return parser


DEFAULTS = {"tol": 1e-10, "n": 41, "format": None, "monitors": False}


def _resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = read_config(args.config)
        except (OSError, ValueError) as exc:
            parser.error(f"config: {exc}")
    merged = dict(DEFAULTS)
    merged.update(cfg)
    for key, value in vars(args).items():
        if value is not None:
            merged[key] = value
    unknown = set(cfg) - set(vars(args)) - {"config"}
    if unknown:
        parser.error(f"config keys not valid for '{args.command}': {', '.join(sorted(unknown))}")
    return merged


def _require(opts, parser, *keys):
    missing = [k for k in keys if opts.get(k) is None]
    if missing:
        parser.error("missing " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _params(opts, parser, b=None) -> ProblemParams:
    _require(opts, parser, "beta", "a", "b")
    try:
        return ProblemParams(opts["beta"], opts["a"], opts["b"] if b is None else b)
    except InvalidParams as exc:
        parser.error(str(exc))


def _controls(opts, parser, base):
    kw = {k: opts[k] for k in ("t_max", "rtol", "atol") if opts.get(k) is not None}
    try:
        ctl = base.replace(**kw) if kw else base
        ctl.validate()
    except InvalidControls as exc:
        parser.error(str(exc))
    return ctl


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_integrate(opts, parser) -> int:
    _require(opts, parser, "c")
    params = _params(opts, parser)
    traj = integrate(params, opts["c"], _controls(opts, parser, DEFAULT_CONTROLS))
    if opts.get("out"):
        if (opts.get("format") or "csv") == "csv":
            Path(opts["out"]).write_text(export.trajectory_csv(traj, bool(opts.get("monitors"))))
        else:
            body = {"t": traj.t, "f": traj.f, "fp": traj.fp, "fpp": traj.fpp}
            Path(opts["out"]).write_text(export.dumps(body) + "\n")
    s = traj.final_state
    summary = {
        "termination": str(traj.termination),
        "events_count": len(traj.events),
        "final_state": {"t": s.t, "f": s.f, "fp": s.fp, "fpp": s.fpp},
    }
    print(export.dumps(summary))
    return 0


def _cmd_classify(opts, parser) -> int:
    _require(opts, parser, "c")
    params = _params(opts, parser)
    traj = integrate(params, opts["c"], _controls(opts, parser, DEFAULT_CONTROLS))
    _emit(export.dumps(classification_record(traj, classify(traj)), indent=2) + "\n", opts.get("out"))
    return 0


def _cmd_critical(opts, parser) -> int:
    _require(opts, parser, "which")
    params = _params(opts, parser)
    ctl = _controls(opts, parser, SHOOTING_CONTROLS)
    finder = find_c_star if opts["which"] == "cstar" else find_c_upper
    try:
        cv = finder(params, ctl, opts["tol"])
    except (BracketFailure, PreconditionError) as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_CRITICAL
    _emit(export.dumps(cv.as_record(), indent=2) + "\n", opts.get("out"))
    return 0


def _cmd_sweep(opts, parser) -> int:
    _require(opts, parser, "c_min", "c_max")
    params = _params(opts, parser)
    n = opts["n"]
    if n < 1 or opts["c_max"] < opts["c_min"]:
        parser.error("need --n >= 1 and --c-min <= --c-max")
    lo, hi = opts["c_min"], opts["c_max"]
    grid = [lo] if n == 1 else [lo + (hi - lo) * k / (n - 1) for k in range(n)]
    jobs = opts.get("jobs") or os.cpu_count() or 1
    entries = sweep(params, grid, _controls(opts, parser, DEFAULT_CONTROLS), jobs)
    rows = [{
        "c": e.c,
        "family": e.label.family.value if e.label else None,
        "shape": e.label.shape.value if e.label else None,
        "limit": e.label.limit.value if e.label else None,
        "termination": e.termination,
        "error": e.error,
    } for e in entries]
    if (opts.get("format") or "json") == "csv":
        lines = ["c,family,shape,limit,termination,error"]
        for r in rows:
            lines.append(",".join([export.fmt(r["c"])] + [r[k] or "" for k in
                                  ("family", "shape", "limit", "termination", "error")]))
        text = "\n".join(lines) + "\n"
    else:
        text = export.dumps(rows, indent=2) + "\n"
    _emit(text, opts.get("out"))
    return 0


def _cmd_verify(opts, parser) -> int:
    _require(opts, parser, "suite")
    params = _params(opts, parser)
    jobs = opts.get("jobs") or os.cpu_count() or 1
    report = run_suite(opts["suite"], params, _controls(opts, parser, VERIFY_CONTROLS), jobs)
    _emit(export.dumps(report.as_record(), indent=2) + "\n", opts.get("out"))
    return report.exit_code


COMMANDS = {
    "integrate": _cmd_integrate,
    "classify": _cmd_classify,
    "critical": _cmd_critical,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = _resolve(args, parser)
    try:
        return COMMANDS[args.command](opts, parser)
    except IntegratorError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR


if __name__ == "__main__":
    sys.exit(main())
