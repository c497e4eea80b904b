"""Command-line interface.

Exit codes: 0 success, 1 failed check or invalid PRF, 2 usage or parse
error. Data goes to stdout (CSV, or JSON with ``--json``); diagnostics go
to stderr. Floats are printed with ``repr``, the shortest string that reads
back to the same double.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .builtins import NAMES, get_builtin
from .classify import PROBE, full_report
from .errors import (EvaluationSingularity, InvalidPRF, ParseError, PhaseRangeError,
                     PulseSyncError)
from .expr import prf_from_string
from .prf import AXIOM_LABELS, validate_prf
from .reproduce import CASES, run_case
from .strobe import CONV_TOL, MAX_ITERS, iterate, simulate_events

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_EPS = (0.1, 0.5, 1.0)


class UsageError(Exception):
    pass


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _clean(obj):
    """Make an object strict-JSON safe: non-finite floats become strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit_json(obj, out):
    json.dump(_clean(obj), out, indent=2, allow_nan=False)
    out.write("\n")


def _float_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _eps_range(text):
    parts = text.split(":")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    if len(parts) != 3 or n < 1:
        raise argparse.ArgumentTypeError(f"expected a:b:n with n >= 1, got {text!r}")
    return [float(v) for v in np.linspace(a, b, n)]


def load_prf(source, validate_eps=None):
    """Resolve ``--prf``: a built-in name or ``expr:<dsl string>``.

    Parsed expressions are axiom-checked at ``validate_eps`` when given.
    """
    if source.startswith("expr:"):
        return prf_from_string(source[len("expr:"):], validate_eps=validate_eps, name=source)
    if source in NAMES:
        return get_builtin(source)
    raise UsageError(f"unknown PRF {source!r}; use one of {', '.join(NAMES)} or expr:<formula>")


def _add_prf(p):
    p.add_argument("--prf", required=True,
                   help=f"built-in ({', '.join(NAMES)}) or expr:<formula in phi, eps>")


def cmd_validate(args, out):
    prf = load_prf(args.prf)
    report = validate_prf(prf, args.eps_list, phi_count=args.grid, tol=args.tol)
    if args.json:
        _emit_json(report.to_dict(), out)
    else:
        out.write(f"prf {prf.name}: {args.grid} phases x eps {args.eps_list}\n")
        for c in report.checks:
            where = "" if c.phi is None else f" at phi={_fmt(c.phi)}, eps={_fmt(c.eps)}"
            tag = " (heuristic)" if c.heuristic else ""
            out.write(f"  {c.axiom:<15} {'pass' if c.passed else 'FAIL'}  {AXIOM_LABELS[c.axiom]:<31} "
                      f"worst={_fmt(c.worst_violation)}{where}{tag}\n")
        out.write("all checks pass\n" if report.ok else
                  f"failed: {', '.join(report.failed())}\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_classify(args, out):
    prf = load_prf(args.prf, validate_eps=args.eps_list)
    report = full_report(prf, args.eps_list, probe=args.probe, max_iters=args.max_iters)
    if args.json:
        _emit_json(report.to_dict(), out)
        return EXIT_OK
    lemma = report.lemma3
    out.write(f"prf {report.prf_name} (linearization {report.tilde_name})\n")
    for g, t in zip(report.g_reports, report.tilde_reports):
        out.write(f"eps={_fmt(g.eps)}\n")
        for label, r in (("g", g), ("g~", t)):
            out.write(f"  {label:<3} product={_fmt(r.derivative_product)}  "
                      f"strong={r.strong_verdict}  empirical={r.empirical_verdict}  "
                      f"=> {r.combined}\n")
    out.write(f"corner mixed partials: m0={_fmt(lemma.m0)} m1={_fmt(lemma.m1)} "
              f"sum={_fmt(lemma.m_sum)} => {lemma.lemma3_verdict}, "
              f"very_strong={_fmt(lemma.very_strong)}\n")
    for d in report.disagreements:
        out.write(f"DISAGREEMENT {d}\n")
    for n in report.notes:
        out.write(f"note: {n}\n")
    return EXIT_OK


def cmd_iterate(args, out):
    prf = load_prf(args.prf, validate_eps=[args.eps])
    trace = iterate(prf, args.phi0, args.eps, max_iters=args.max_iters, conv_tol=args.tol)
    if args.json:
        _emit_json(trace.to_dict(), out)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["k", "phi"])
        w.writerows((k, repr(float(p))) for k, p in enumerate(trace.phases))
    print(f"verdict: {trace.verdict} after {trace.iters_used} steps", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args, out):
    prf = load_prf(args.prf, validate_eps=args.eps_range)
    with ThreadPoolExecutor(max_workers=min(8, len(args.eps_range))) as pool:
        traces = list(pool.map(
            lambda e: iterate(prf, args.phi0, e, max_iters=args.max_iters, conv_tol=args.tol),
            args.eps_range))
    if args.json:
        _emit_json([t.to_dict(include_phases=False) for t in traces], out)
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["eps", "verdict", "iters", "final_phi"])
    for t in traces:
        w.writerow([repr(t.eps), t.verdict, t.iters_used, repr(t.final)])
    return EXIT_OK


def cmd_simulate(args, out):
    prf = load_prf(args.prf, validate_eps=[args.eps])
    events = simulate_events(prf, args.phiA, args.phiB, args.eps, 2 * args.cycles)
    fields = ("time", "firer", "phase_other_before", "phase_other_after")
    if args.json:
        _emit_json([{f: getattr(e, f) for f in fields} for e in events], out)
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(fields)
    for e in events:
        w.writerow([_fmt(getattr(e, f)) for f in fields])
    return EXIT_OK


def cmd_reproduce(args, out):
    cases = CASES if args.case == "all" else (args.case,)
    results = {c: run_case(c) for c in cases}
    ok = all(ch.passed for checks in results.values() for ch in checks)
    if args.json:
        _emit_json({"ok": ok, "cases": {c: [ch.to_dict() for ch in checks]
                                        for c, checks in results.items()}}, out)
    else:
        for c, checks in results.items():
            for ch in checks:
                out.write(f"{'PASS' if ch.passed else 'FAIL'}  {c}: {ch.name}  ({ch.detail})\n")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pulsesync",
        description="Synchrony of two pulse-coupled phase oscillators: PRF checks, "
                    "strobe-map iteration and stability classification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the PRF axioms on a grid")
    _add_prf(p)
    p.add_argument("--eps-list", type=_float_list, default=list(DEFAULT_EPS))
    p.add_argument("--grid", type=int, default=1001, help="number of phase points")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="stability of synchrony for g and its linearization")
    _add_prf(p)
    p.add_argument("--eps-list", type=_float_list, required=True)
    p.add_argument("--probe", type=float, default=PROBE)
    p.add_argument("--max-iters", type=int, default=MAX_ITERS)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("iterate", help="fixed-point iteration of the strobe map (CSV k,phi)")
    _add_prf(p)
    p.add_argument("--phi0", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--max-iters", type=int, default=MAX_ITERS)
    p.add_argument("--tol", type=float, default=CONV_TOL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("sweep", help="iterate over a range of strengths")
    _add_prf(p)
    p.add_argument("--eps-range", type=_eps_range, required=True, metavar="A:B:N")
    p.add_argument("--phi0", type=float, required=True)
    p.add_argument("--max-iters", type=int, default=MAX_ITERS)
    p.add_argument("--tol", type=float, default=CONV_TOL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="event-driven two-oscillator run")
    _add_prf(p)
    p.add_argument("--phiA", type=float, required=True)
    p.add_argument("--phiB", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--cycles", type=int, required=True,
                   help="number of cycles; each cycle is two firings")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="re-run a theorem or identity check")
    p.add_argument("--case", required=True, choices=CASES + ("all",))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidPRF, PhaseRangeError, EvaluationSingularity) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (PulseSyncError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
