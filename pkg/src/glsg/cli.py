"""Command-line entry point: ``glsg <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from glsg.census import (
    check_order,
    format_report,
    run_census,
    spot_check_canonical,
)
from glsg.errors import GlsgError
from glsg.graph import build_graph, export_graph, naive_degrees
from glsg.invariants import compute_invariants, delta_obstruction
from glsg.semigroup import (
    FAMILY_GRAMMAR,
    CayleyTable,
    build_family,
    format_table_text,
    parse_table,
    table_to_json,
)
from glsg.spectral import CLUSTER_TOL, spectrum

ORACLE_MAX_ORDER = 20

EPILOG = f"""\
family specs: {FAMILY_GRAMMAR}

table files: either text (first line n, then n lines of n space-separated
entries in 1..n) or JSON {{"n": n, "table": [[...], ...]}}. With neither
--file nor --family the table is read from stdin.

exit codes: 0 success, 1 domain error (one line on stderr), 2 usage error.
"""


class OracleMismatch(GlsgError):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True)


def _add_input(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--file", help="table file ('-' for stdin)")
    source.add_argument("--family", help="family spec, e.g. band:2x3")


def _load(args) -> CayleyTable:
    if args.family:
        return build_family(args.family)
    if args.file and args.file != "-":
        with open(args.file) as fh:
            return parse_table(fh.read())
    return parse_table(sys.stdin.read())


def analyze_report(t: CayleyTable, oracle: bool = True) -> dict:
    """Invariant summary; cross-checks against the explicit graph when asked."""
    inv = compute_invariants(t)
    delta, blocked = delta_obstruction(t)
    formula = inv.deg.ravel().tolist()
    oracle_degrees = None
    if oracle:
        oracle_degrees = naive_degrees(build_graph(t))
        if oracle_degrees != formula:
            bad = next(p for p, (a, b) in enumerate(zip(formula, oracle_degrees)) if a != b)
            raise OracleMismatch(vertex=bad + 1, formula=formula[bad], oracle=oracle_degrees[bad])
    return {
        "order": t.n,
        "regular": inv.regular,
        "degree_set": inv.degree_set,
        "ns": inv.ns.tolist(),
        "min_deg": min(formula),
        "max_deg": max(formula),
        "delta_max": delta,
        "blocked": blocked,
        "formula_degrees": formula,
        "oracle_degrees": oracle_degrees,
    }


def _analyze_text(report: dict) -> str:
    lines = [f"order: {report['order']}"]
    if report["regular"]:
        lines.append(f"regular: yes, degree {report['degree_set'][0]}")
    else:
        lines.append(f"regular: no, degree set {report['degree_set']}")
    lines.append(f"N_S: {report['ns']}")
    lines.append(f"degree range: {report['min_deg']}..{report['max_deg']}")
    verdict = "blocks regularity" if report["blocked"] else "not blocking"
    lines.append(f"delta_max: {report['delta_max']} ({verdict})")
    lines.append(f"formula degrees: {report['formula_degrees']}")
    if report["oracle_degrees"] is None:
        lines.append("oracle degrees: skipped")
    else:
        lines.append(f"oracle degrees: {report['oracle_degrees']} (match)")
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    t = _load(args)
    if args.format == "json":
        print(_dump({"n": t.n, "valid": True}))
    else:
        print(f"valid semigroup of order {t.n}")
    return 0


def cmd_family(args) -> int:
    t = build_family(args.spec)
    sys.stdout.write(table_to_json(t) + "\n" if args.format == "json" else format_table_text(t))
    return 0


def cmd_analyze(args) -> int:
    t = _load(args)
    oracle = not args.no_oracle and t.n <= ORACLE_MAX_ORDER
    if not oracle and not args.no_oracle:
        print(f"notice: oracle check skipped for order {t.n} > {ORACLE_MAX_ORDER}", file=sys.stderr)
    report = analyze_report(t, oracle=oracle)
    sys.stdout.write(_dump(report) + "\n" if args.format == "json" else _analyze_text(report))
    return 0


def cmd_graph(args) -> int:
    g = build_graph(_load(args), allow_large=args.allow_large)
    text = export_graph(g, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_spectrum(args) -> int:
    g = build_graph(_load(args), allow_large=args.allow_large)
    spec = spectrum(g, args.cluster_tol)
    if args.format == "json":
        print(_dump(spec.as_dict()))
    else:
        for value, mult in spec.as_dict()["clusters"]:
            print(f"{value:g} x{mult}")
        print(f"energy: {spec.energy:.12g}")
    return 0


def cmd_census(args) -> int:
    for n in range(1, args.max_order + 1):
        check_order(n, args.allow_order_6)
    rows, witnesses = [], {}
    if args.checkpoint_dir:
        os.makedirs(args.checkpoint_dir, exist_ok=True)
    for n in range(1, args.max_order + 1):
        checkpoint = None
        if args.checkpoint_dir:
            checkpoint = os.path.join(args.checkpoint_dir, f"order-{n}.ckpt")

        def progress(done, total, n=n):
            print(f"progress order={n} subtree={done}/{total}", file=sys.stderr, flush=True)

        result = run_census(
            n,
            allow_order_6=args.allow_order_6,
            workers=args.workers,
            checkpoint=checkpoint,
            progress=progress if (args.progress or n == 6) else None,
        )
        rows.append(result.row)
        witnesses[n] = result.regular
        if args.spot_check:
            spot_check_canonical(n, args.spot_check, seed=args.seed)

    if args.format == "json":
        doc = []
        for r in rows:
            entry = {
                "order": r.order,
                "labeled_total": r.labeled_total,
                "canonical_total": r.canonical_total,
                "regular_count": r.regular_count,
                "percentage": r.percentage,
            }
            if args.witnesses:
                entry["witnesses"] = [
                    {"table": t.rows(), "degree": d} for t, d in witnesses[r.order]
                ]
            doc.append(entry)
        print(_dump(doc))
        return 0
    sys.stdout.write(format_report(rows, args.format))
    if args.witnesses and args.format == "text":
        for n, regs in witnesses.items():
            print(f"\norder {n} regular witnesses:")
            for t, d in regs:
                print(f"  degree {d}: {t.rows()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glsg",
        description="Generalized Latin square graphs of finite semigroups.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a table is a semigroup")
    _add_input(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("family", help="print the table of a family instance")
    p.add_argument("spec", help=FAMILY_GRAMMAR)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("analyze", help="invariants, degrees and regularity")
    _add_input(p)
    p.add_argument("--format", choices=["text", "json"], default="json")
    p.add_argument("--no-oracle", action="store_true", help="skip the explicit-graph degree check")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("graph", help="export the graph")
    _add_input(p)
    p.add_argument("--format", choices=["edge-list", "dot"], default="edge-list")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("spectrum", help="adjacency spectrum and energy")
    _add_input(p)
    p.add_argument("--format", choices=["text", "json"], default="json")
    p.add_argument("--cluster-tol", type=float, default=CLUSTER_TOL)
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("census", help="count semigroups with regular graphs")
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--allow-order-6", action="store_true")
    p.add_argument("--format", choices=["csv", "text", "json"], default="text")
    p.add_argument("--witnesses", action="store_true", help="list regular representatives")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint-dir", help="save/resume state as DIR/order-N.ckpt")
    p.add_argument("--progress", action="store_true", help="progress lines on stderr")
    p.add_argument("--spot-check", type=int, default=0, metavar="K",
                   help="re-canonicalise K randomly relabelled tables per order")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_census)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GlsgError as exc:
        print(exc.line(), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IOError path={exc.filename} reason={exc.strerror}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
