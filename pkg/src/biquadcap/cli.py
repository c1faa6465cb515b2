"""Command-line front end."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .capitulation import EXTENSIONS, candidate_sets, constructive_witnesses, kappa
from .config import ENV_VAR, bounds
from .errors import InconsistencyError, PreconditionError
from .oracle import imag_class_group, parse_fixtures, fixture_text
from .report import SCAN_COLUMNS, build_report, dumps, scan, to_markdown, verify_fixtures

EXIT_OK, EXIT_INPUT, EXIT_FIXTURE, EXIT_INCONSISTENT = 0, 2, 3, 4
NO_WITNESS = "no constructive witness in this branch; kernel from candidate set"


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as e:
            raise PreconditionError(f"cannot write {out}: {e}") from e
    else:
        sys.stdout.write(text)


def _apply_aux(args) -> None:
    if getattr(args, "aux_bound", None) is not None:
        b = replace(bounds(), aux=args.aux_bound)
        os.environ[ENV_VAR] = f"aux={b.aux},cf={b.cf}"


def cmd_report(args) -> int:
    doc = build_report(args.p, args.q, args.aux_bound)
    _emit(to_markdown(doc) if args.md else dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    rows = scan(args.p_max, args.q_max, args.filter, args.jobs)
    if args.json:
        _emit(dumps(rows) + "\n", args.out)
        return EXIT_OK
    lines: list[str] = []

    class _Sink:
        def write(self, s: str) -> None:
            lines.append(s)

    if rows:
        w = csv.DictWriter(_Sink(), fieldnames=SCAN_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        text = Path(args.fixtures).read_text() if args.fixtures else fixture_text()
        rows = parse_fixtures(text)
    except (OSError, ValueError, KeyError) as e:
        raise PreconditionError(f"fixture file corrupt: {e}") from e
    results = verify_fixtures(rows)
    if args.json:
        _emit(dumps([r.to_dict() for r in results]) + "\n", args.out)
    else:
        out = []
        for r in results:
            fails = [c for c in r.cells if c.status == "fail"]
            only = [c.cell for c in r.cells if c.status == "fixture-only"]
            head = f"d={r.row.d} [{r.row.table}] {'PASS' if r.ok else 'FAIL'}"
            head += f" ({len(r.cells) - len(only)} checked, {len(fails)} failed"
            head += f", fixture-only: {', '.join(only)})" if only else ")"
            out.append(head)
            out += [f"    {c.cell}: FAIL ({c.detail})" for c in fails]
        bad = sum(not r.ok for r in results)
        out.append(f"{len(results) - bad}/{len(results)} rows pass")
        _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_FIXTURE


def cmd_witness(args) -> int:
    j = args.field
    rep = kappa(args.p, args.q, j)
    cons = constructive_witnesses(args.p, args.q, j)
    branch, cands = candidate_sets(args.p, args.q, j)
    # a constructive witness settles the branch only when it pins the kernel down
    decisive = len(cands) == 1 and any(w.route == "constructive" for w in cons)
    if args.json:
        doc = {"field": j, "p": args.p, "q": args.q, "branch": branch,
               "witnesses": [w.to_dict() for w in rep.witnesses],
               "message": None if decisive else NO_WITNESS, "kernel": rep.kernel_text()}
        _emit(dumps(doc) + "\n", args.out)
        return EXIT_OK
    out = [f"{j}({args.p},{args.q}) branch {branch}"]
    for w in rep.witnesses:
        status = "verified" if w.verified else "FAILED"
        out.append(f"[{w.route}] {w.label}: α = {w.alpha.to_text()}")
        out.append(f"    α = {w.alpha}")
        out.append(f"    {w.identity}  [{status}]")
    if not decisive:
        out.append(NO_WITNESS)
    out.append(f"kernel: {rep.kernel_text()} ({rep.resolved_by})")
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK


def cmd_class_group(args) -> int:
    g = imag_class_group(args.disc)
    doc = {"D": g.D, "order": g.order, "structure": list(g.structure),
           "forms": [list(f) for f in g.forms]}
    _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biquadcap", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def pair(sp):
        sp.add_argument("-p", type=int, required=True)
        sp.add_argument("-q", type=int, required=True)

    def common(sp):
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--aux-bound", type=int, help=f"auxiliary prime bound (env {ENV_VAR})")

    sp = sub.add_parser("report", help="full analysis of one pair")
    pair(sp)
    common(sp)
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--md", action="store_true", help="Markdown tables")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("scan", help="one row per admissible pair")
    sp.add_argument("--p-max", type=int, default=100)
    sp.add_argument("--q-max", type=int, default=100)
    sp.add_argument("--filter", action="append", default=[],
                    help="p1mod8, p5mod8, xs, app, k2-case1..3, k3-case1..4 (repeatable)")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true", help="CSV output (default)")
    fmt.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify-fixtures", help="recompute every checkable table cell")
    sp.add_argument("--fixtures", help="alternate fixture CSV")
    sp.add_argument("--json", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("witness", help="print capitulation witnesses")
    pair(sp)
    sp.add_argument("--field", choices=EXTENSIONS, required=True)
    sp.add_argument("--json", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("oracle", help="independent cross-check tools")
    osub = sp.add_subparsers(dest="oracle_command", required=True)
    cg = osub.add_parser("class-group", help="class group of a negative discriminant")
    cg.add_argument("-D", "--disc", type=int, required=True)
    cg.add_argument("--out")
    cg.set_defaults(func=cmd_class_group)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _apply_aux(args)
        return args.func(args)
    except PreconditionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InconsistencyError as e:
        print(f"verification failure: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
