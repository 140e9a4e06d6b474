"""Command-line entry point: ``orbvol search | prove | bounds``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import bounds
from .pipeline import COMMANDS, SearchDomainError, classify_outcomes, enumerate_slopes, in_filling_set
from .report import Report
from .triangulation import FixtureSyntaxError, UnknownManifoldError

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixtures", help="directory holding <name>.tri and h1.txt fixtures")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--jobs", type=int, default=1, help="parallel filling solves")
    common.add_argument("--figures", metavar="DIR", help="also write figures into DIR")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="orbvol", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("search", parents=[common], help="enumerate short slopes with a fixed gcd")
    s.add_argument("manifold")
    s.add_argument("--budget", type=float, required=True)
    s.add_argument("--gcd", type=int, required=True)

    p = sub.add_parser("prove", parents=[common], help="replay a volume-bound proof")
    p.add_argument("theorem", choices=sorted(COMMANDS))

    b = sub.add_parser("bounds", parents=[common], help="evaluate one closed-form bound")
    b.add_argument("kind", choices=("drill", "fill", "collar"))
    b.add_argument("value")
    return parser


def _bounds_report(kind: str, raw: str) -> Report:
    rep = Report(f"bounds {kind}")
    chain = bounds.BoundChain(f"{kind} {raw}")
    if kind == "drill":
        out = chain.apply("drill factor", "drill_factor", "Agol-Dunfield with Przeworski", r=float(raw))
    elif kind == "fill":
        out = chain.apply("fill factor", "fill_factor", "Futer-Kalfagianni-Purcell", l_min=float(raw))
    else:
        out = chain.apply("collar radius", "collar_high_order",
                          "Gehring-Marshall-Martin order >= 7", p=int(raw))
    chain.check(f"value is finite ({out:.10g})", out == out)
    rep.add_chain(chain)
    return rep


def _search_report(args) -> Report:
    res = enumerate_slopes(args.manifold, args.budget, args.gcd, args.fixtures, args.jobs)
    rep = Report(f"search {args.manifold} --budget {args.budget} --gcd {args.gcd}")
    rep.searches.append(res)
    tally = classify_outcomes(res)
    rep.tables["tally"] = [tally.as_row()]
    for r in res.slopes:
        if r.residual is not None:
            rep.verdict(f"{args.manifold}{r.label} residual {r.residual:.2e} <= 1e-12", r.residual <= 1e-12)
    ok = all(in_filling_set(r.length, args.budget, res.complete_volume) for r in res.slopes)
    rep.verdict(f"all {len(res)} slopes satisfy 1 - (2 pi / l)^2 <= (B / vol)^(2/3)", ok)
    return rep


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.cmd == "search":
            rep = _search_report(args)
        elif args.cmd == "prove":
            fn = COMMANDS[args.theorem]
            if args.theorem in ("no2torsion", "fourtorsion"):
                rep = fn(fixtures=args.fixtures, jobs=args.jobs)
            else:
                rep = fn()
        else:
            rep = _bounds_report(args.kind, args.value)
    except (UnknownManifoldError, FileNotFoundError, FixtureSyntaxError, OSError) as exc:
        print(f"orbvol: fixture error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SearchDomainError, bounds.BoundDomainError, ValueError) as exc:
        print(f"orbvol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(rep.render(args.format, timestamp=not args.no_timestamp))
    if args.figures:
        from .plotting import report_figures

        for path in report_figures(rep, args.figures, args.fixtures):
            print(f"figure: {path}", file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
