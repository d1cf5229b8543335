"""Command line entry point: analyze, corpus, selftest, import."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import AngleRankError, MalformedRow
from .report import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_RECORD,
    EXIT_SELFTEST,
    Config,
    ConjectureReport,
    analyze,
    dump_corpus,
    import_lmfdb,
    run_corpus,
    selftest,
)


def _int_list(text: str) -> list[int]:
    text = text.strip().strip("[]")
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision-bits", type=int, default=128, help="starting working precision")
    p.add_argument("--precision-cap", type=int, default=16384, help="largest precision tried")
    p.add_argument("--denom-bound", type=int, default=None, help="root-of-unity order bound D")
    p.add_argument("--height-bound", type=int, default=2 ** 20, help="relation coefficient bound B")
    p.add_argument("--m-max", type=int, default=12, help="base extensions checked for simplicity")
    p.add_argument("--degree", type=int, default=None, help="only print this cohomological degree 2n")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anglerank",
                                     description="Frobenius angle ranks and exotic Tate classes.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze one Weil polynomial")
    a.add_argument("coeffs", type=_int_list, help="ascending coefficients, e.g. 2,0,1")
    a.add_argument("-q", type=int, required=True)
    a.add_argument("--label", default="")
    a.add_argument("--e-trace", type=int, default=None, help="trace of a specific elliptic curve E")
    _common(a)

    c = sub.add_parser("corpus", help="analyze a JSONL corpus")
    c.add_argument("path", type=Path)
    c.add_argument("-o", "--out", type=Path, default=None, help="write reports and summary here")
    _common(c)

    s = sub.add_parser("selftest", help="run the built-in invariant suite")
    _common(s)

    i = sub.add_parser("import", help="convert a CSV/JSON export to a JSONL corpus")
    i.add_argument("path", type=Path)
    i.add_argument("-o", "--out", type=Path, default=None)
    _common(i)
    return parser


def _config(args) -> Config:
    return Config(precision_bits=args.precision_bits, precision_cap=args.precision_cap,
                  denom_bound=args.denom_bound, height_bound=args.height_bound, m_max=args.m_max,
                  degree=args.degree, threads=args.threads)


def _print_report(r: ConjectureReport) -> None:
    print(f"{r.label or 'input'}: g={r.g} q={r.q} p={r.p} newton={r.newton_class}")
    if r.simple:
        print(f"  simple: irreducible={r.simple['irreducible']} ({r.simple['certificate']}), "
              f"absolutely simple={r.simple['absolutely_simple']} (m <= {r.simple['m_checked']})")
    if r.angle_rank:
        print(f"  angle rank: {r.angle_rank['value']} [{r.angle_rank['status']}]")
    if r.lemma:
        print(f"  lemma form: {r.lemma['verdict']}" + (f" N={r.lemma['N']}" if r.lemma["N"] else ""))
    for key, rows in r.tables.items():
        ell = r.elliptic.get(key)
        head = f"  {key}" + (f" (a_E = {ell['trace']})" if ell else "")
        print(head + ":  degree  tate  lefschetz  exotic")
        for row in rows:
            print(f"      {row['degree']:>6} {row['tate']:>5} {row['lefschetz']:>10} {row['exotic']:>7}")
    for c in r.corollary_checks:
        print(f"  {c['id']} [{c['table']}]: {'pass' if c['pass'] else 'FAIL'}  {c['detail']}")
    for a in r.applicability:
        tag = "applies" + (" (conditional)" if a["conditional"] else "") if a["applies"] else "no"
        print(f"  {a['theorem']}: {tag}; {a['reason']}")
    for e in r.errors:
        print(f"  error [{e['stage']}] {e['type']}: {e['message']}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = _config(args)

    if args.command == "analyze":
        record = {"label": args.label, "q": args.q, "coeffs": args.coeffs}
        if args.e_trace is not None:
            record["e_trace"] = args.e_trace
        r = analyze(record, config)
        if args.json:
            print(r.to_json())
        else:
            _print_report(r)
        if any(e["stage"] == "parse" or e["type"] == "RootModulusViolation" for e in r.errors):
            return EXIT_INPUT
        return EXIT_RECORD if r.failed else EXIT_OK

    if args.command == "corpus":
        try:
            result = run_corpus(args.path, config)
        except OSError as exc:
            print(f"cannot read corpus: {exc}", file=sys.stderr)
            return EXIT_INPUT
        text = dump_corpus(result)
        if args.out:
            args.out.write_text(text, encoding="utf-8")
        if args.json and not args.out:
            sys.stdout.write(text)
        else:
            print(json.dumps(result.summary, indent=1, sort_keys=True))
        return result.exit_code

    if args.command == "selftest":
        ok, rows = selftest(config)
        if args.json:
            print(json.dumps([{"check": r.name, "pass": r.passed, "detail": r.detail} for r in rows], indent=1))
        else:
            width = max(len(r.name) for r in rows)
            for r in rows:
                print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}")
        return EXIT_OK if ok else EXIT_SELFTEST

    if args.command == "import":
        try:
            result = import_lmfdb(args.path)
        except (OSError, MalformedRow, AngleRankError) as exc:
            print(f"{args.path}: {exc}", file=sys.stderr)
            return EXIT_INPUT
        for w in result.warnings:
            print(f"warning: {w}", file=sys.stderr)
        if args.out:
            args.out.write_text(result.to_jsonl(), encoding="utf-8")
        else:
            sys.stdout.write(result.to_jsonl())
        return EXIT_OK
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
