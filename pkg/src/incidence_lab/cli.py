"""Command line entry point.

Exit codes: 0 success, 1 a verification failed, 2 usage error. Data goes to
stdout (or --out); diagnostics and timings go to stderr. JSON output is always
a single object; tabular commands put their records under "rows".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from fractions import Fraction

from . import constructions, engine, estimator, totients

log = logging.getLogger("incidence_lab")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _n_value(text: str) -> int:
    # accepts 1000000, 1e6 or 10^7.5; non-integers are rounded
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(round(float(base) ** float(exp)))
    try:
        return int(text)
    except ValueError:
        return int(round(float(text)))


def _n_list(text: str) -> list[int]:
    return [_n_value(t) for t in text.split(",") if t.strip()]


def _geometric(text: str) -> list[int]:
    try:
        start, factor, count = text.split(":")
        return estimator.geometric_ladder(_n_value(start), float(factor), int(count))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:factor:count, got {text!r}")


def _common(suppress: bool) -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand; the subcommand
    # copy uses SUPPRESS defaults so it never overwrites a value given earlier.
    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=default(None),
                        help="output format (default depends on the subcommand)")
    common.add_argument("--out", default=default("-"), help="output path, '-' for stdout (default)")
    common.add_argument("--threads", type=_positive, default=default(1),
                        help="worker threads (default 1)")
    common.add_argument("--bf-cap", type=_positive, default=default(engine.BRUTE_FORCE_CAP),
                        help=f"brute-force point cap (default {engine.BRUTE_FORCE_CAP})")
    common.add_argument("-v", "--verbose", action="store_true", default=default(False),
                        help="log progress to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(prog="incidence-lab", parents=[_common(suppress=False)],
                                     description="Exact point-line incidence counts on lattice grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="emit an explicit line set")
    p.add_argument("--kind", choices=("erdos", "elekes", "family"), required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--alpha", type=_rational, default=Fraction(1, 2))

    p = sub.add_parser("lemmas", parents=[common], help="totient identity checks as CSV")
    p.add_argument("--N", type=_positive, default=1000)

    for name, text in (("count", "closed-form incidence report"),
                       ("oracle-diff", "compare closed form with brute force"),
                       ("formulas", "per-slope exact counts next to the approximations")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--W", type=_positive, required=True)
        p.add_argument("--H", type=_positive, required=True)
        p.add_argument("--T", type=int, required=True)
        p.add_argument("--no-exclude-diagonal", action="store_true")
        if name == "count":
            p.add_argument("--oracle", action="store_true", help="use the brute-force oracle")

    p = sub.add_parser("profile", parents=[common], help="one slope family as JSON")
    p.add_argument("--W", type=_positive, required=True)
    p.add_argument("--H", type=_positive, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--slope", required=True, help="slope as -s/r or s/r")

    p = sub.add_parser("estimate", parents=[common], help="single sweep row as JSON")
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--n", type=_n_value, required=True)
    p.add_argument("--eps-exp", type=_rational, default=estimator.DEFAULT_EPS_EXPONENT,
                   help="epsilon = n^(-eps_exp) (default 1/5)")

    p = sub.add_parser("sweep", parents=[common], help="convergence sweep as CSV")
    p.add_argument("--alpha", type=_rational, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n-list", type=_n_list)
    group.add_argument("--n-geometric", type=_geometric)
    p.add_argument("--eps-exp", type=_rational, default=estimator.DEFAULT_EPS_EXPONENT)
    return parser


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _params(args) -> constructions.FamilyParams:
    return constructions.FamilyParams(args.W, args.H, args.T, not args.no_exclude_diagonal)


def _cmd_gen(args) -> tuple[str, int]:
    if args.kind == "erdos":
        lines = constructions.erdos_lines(args.n)
    elif args.kind == "elekes":
        lines = constructions.elekes_lines(args.n)
    else:
        lines = constructions.family_lines_simplified(args.n, args.alpha)
    if lines.warning:
        log.warning("%s", lines.warning)
    if args.format == "json":
        return _json({"kind": lines.kind, "params": lines.params, "warning": lines.warning,
                      "lines": [[ln.A, ln.B, ln.C] for ln in lines.lines]}), 0
    return _csv(("A", "B", "C"), ((ln.A, ln.B, ln.C) for ln in lines.lines)), 0


def _cmd_lemmas(args) -> tuple[str, int]:
    if args.N < 2:
        raise _Usage("lemmas needs --N >= 2 (the envelopes vanish at N = 1)")
    rows = totients.lemma_checks(args.N)
    header = ("lemma_id", "N_or_params", "exact_value", "main_term", "residual", "envelope", "pass")
    data = [(r.lemma_id, r.params, r.exact_value, r.main_term, r.residual, r.envelope, r.passed)
            for r in rows]
    ok = all(r.passed for r in rows)
    for r in rows:
        if not r.passed:
            log.error("lemma %s failed at %s", r.lemma_id, r.params)
    if args.format == "json":
        return _json({"rows": [dict(zip(header, d)) for d in data]}), 0 if ok else 1
    return _csv(header, data), 0 if ok else 1


def _cmd_count(args) -> tuple[str, int]:
    params = _params(args)
    if args.oracle:
        report = engine.brute_force_report(params, cap=args.bf_cap)
    else:
        report = engine.count_family(params, threads=args.threads)
    return _json(report.to_dict()), 0


def _cmd_oracle_diff(args) -> tuple[str, int]:
    params = _params(args)
    fast = engine.count_family(params, threads=args.threads)
    slow = engine.brute_force_report(params, cap=args.bf_cap)
    bad = fast.diff(slow)
    for field in bad:
        log.error("mismatch in %s: closed_form=%s brute_force=%s",
                  field, fast.counts()[field], slow.counts()[field])
    out = {"match": not bad, "mismatches": bad,
           "closed_form": fast.to_dict(), "brute_force": slow.to_dict()}
    return _json(out), 1 if bad else 0


def _cmd_formulas(args) -> tuple[str, int]:
    rows = engine.anchor_formula_report(_params(args))
    if args.format == "json":
        return _json({"rows": rows}), 0
    header = list(rows[0]) if rows else ["slope", "quadrant"]
    return _csv(header, ([row[h] for h in header] for row in rows)), 0


def _cmd_profile(args) -> tuple[str, int]:
    slope = engine.ReducedSlope.parse(args.slope)
    prof = engine.slope_family_stats(args.W, args.H, slope, args.T)
    out = {
        "W": args.W, "H": args.H, "T": prof.T, "slope": str(prof.slope),
        "ap_T": prof.ap_T, "ap_T1": prof.ap_T1,
        "qualifying_lines": prof.qualifying_lines, "incidences": prof.incidences,
        "e": list(prof.e) if prof.e is not None else None,
    }
    return _json(out), 0


def _row_dict(row: estimator.SweepRow) -> dict:
    return dict(zip(row.COLUMNS, row.values()))


def _cmd_estimate(args) -> tuple[str, int]:
    params = estimator.grid_for(args.n, args.alpha, args.eps_exp)
    row = estimator.row_for(params, threads=args.threads)
    log.info("wall time %.3fs", row.wall_time)
    return _json(_row_dict(row)), 0


def _cmd_sweep(args) -> tuple[str, int]:
    n_list = args.n_list if args.n_list is not None else args.n_geometric
    rows = estimator.sweep(args.alpha, n_list, args.eps_exp, threads=args.threads)
    for row in rows:
        print(f"n={row.n} wall_time={row.wall_time:.3f}s", file=sys.stderr)
    if args.format == "json":
        return _json({"rows": [_row_dict(r) for r in rows]}), 0
    return _csv(estimator.SweepRow.COLUMNS, (r.values() for r in rows)), 0


COMMANDS = {
    "gen": _cmd_gen,
    "lemmas": _cmd_lemmas,
    "count": _cmd_count,
    "oracle-diff": _cmd_oracle_diff,
    "formulas": _cmd_formulas,
    "profile": _cmd_profile,
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
}


class _Usage(Exception):
    pass


def _glue_slope(argv: list[str]) -> list[str]:
    # argparse would read "-1/2" as an option, so bind it to --slope explicitly
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--slope":
            out.append(f"--slope={next(it, '')}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_slope(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    start = time.perf_counter()
    try:
        data, code = COMMANDS[args.command](args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out == "-":
        sys.stdout.write(data)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(data)
    log.info("%s finished in %.3fs", args.command, time.perf_counter() - start)
    return code


if __name__ == "__main__":
    sys.exit(main())
