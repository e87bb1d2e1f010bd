"""Command-line front end.

    cuspfield solve --braid aB --repeat 2
    cuspfield field --two-bridge 7/3 --json out.json
    cuspfield twobridge 5/2 --exact

Exit codes: 0 success, 1 bad input (parse, configuration, unsupported
diagram), 2 no certified result (no geometric solution, recognition or
elimination failure).
"""

import argparse
import json
import sys

from . import pipeline
from .errors import ConfigError, CuspFieldError, DiagramError, LabelSystemError

INPUT_ERRORS = (ConfigError, DiagramError, LabelSystemError)


def _add_common(p, selectors=True):
    if selectors:
        p.add_argument("--pd", help="planar diagram code, e.g. 'X[1,5,2,4] X[3,1,4,6] ...'")
        p.add_argument("--dt", help="Dowker-Thistlethwaite code of a knot, e.g. '4 6 8 2'")
        p.add_argument("--braid", help="braid word: a, b, ... generators, capitals inverse")
        p.add_argument("--repeat", type=int, help="power of the braid word")
        p.add_argument("--two-bridge", dest="two_bridge", metavar="A/B", help="two-bridge fraction")
    p.add_argument("--bits", type=int, default=128, help="working precision (default 128)")
    p.add_argument("--starts", type=int, default=200, help="multistart attempts (default 200)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-degree", dest="max_degree", type=int, default=8)
    p.add_argument("--height-bits", dest="height_bits", type=int, default=64)
    p.add_argument("--no-bigon-reduction", dest="bigon_reduction", action="store_false")
    p.add_argument("--json", dest="json_path", metavar="PATH", help="write the report here")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="cuspfield",
        description="Hyperbolic structures and invariant trace fields of alternating links from diagrams.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("solve", help="geometric solution, distances and shapes"))
    _add_common(sub.add_parser("field", help="solve and recognise the invariant trace field"))
    tb = sub.add_parser("twobridge", help="exact elimination for a two-bridge link")
    tb.add_argument("fraction", metavar="A/B")
    tb.add_argument("--exact", action="store_true", help="eliminate to P(w1) and certify it")
    _add_common(tb, selectors=False)
    return ap


def config_from(args):
    keys = pipeline.RunConfig.__dataclass_fields__
    return pipeline.RunConfig(**{k: v for k, v in vars(args).items() if k in keys})


def summary(report):
    lines = []
    d = report["diagram"]
    comps = "%d component%s" % (d["components"], "" if d["components"] == 1 else "s")
    lines.append("diagram: %d crossings, %s" % (d["n"], comps))
    lines.append("residual: %.3e" % float(report["solution"]["residual"]))
    if "field" in report:
        f = report["field"]
        lines.append("field: degree %d, min poly %s" % (f["degree"], f["min_poly"]))
        if f["failures"]:
            lines.append("not expressed: %s" % ", ".join(f["failures"]))
    tb = report.get("twobridge")
    if tb and tb["exact"]:
        lines.append("P: degree %d, retained factor %s" % (len(tb["P"]) - 1, tb["factor"]))
        for note in tb["notes"]:
            lines.append("warning: " + note)
    return "\n".join(lines)


def run(args):
    cfg = config_from(args)
    if args.command == "solve":
        return pipeline.solve_report(pipeline.run_solve(cfg))
    if args.command == "field":
        return pipeline.field_report(pipeline.run_field(cfg))
    return pipeline.twobridge_report(pipeline.run_twobridge(cfg, args.fraction))


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report = run(args)
    except CuspFieldError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 1 if isinstance(exc, INPUT_ERRORS) else 2
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if args.json_path:
        with open(args.json_path, "w") as fh:
            fh.write(text)
        print(summary(report))
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
