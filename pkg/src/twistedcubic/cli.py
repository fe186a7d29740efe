"""Command line entry point.  Exit status: 0 pass, 1 failed check, 2 usage error."""
from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .cubic import LineClass
from .pg3 import ParseError


def _poly(text: str) -> list[int]:
    try:
        return [int(c) for c in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad polynomial {text!r}; want c0,c1,...,1") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistedcubic", description="Line orbits of the twisted cubic in PG(3,q).")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="size of every line class, as CSV")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--poly", type=_poly, help="field modulus coefficients, lowest degree first")

    p = sub.add_parser("orbits", help="orbit decomposition of one or all line classes, as JSON")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--class", dest="cls", choices=[c.value for c in LineClass])
    p.add_argument("--method", choices=["auto", "bfs", "expand"], default="auto")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--dump-members", action="store_true", help="include every member key (large)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--poly", type=_poly)

    p = sub.add_parser("verify", help="check every orbit prediction for one q")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--json", dest="json_out", help="write the report here")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--rho", type=int, help="non-square used for the representatives")
    p.add_argument("--method", choices=["auto", "bfs", "expand"], default="auto")

    p = sub.add_parser("small-q", help="orbit pattern at q = 2, 3, 4")
    p.add_argument("--q", type=int, required=True, choices=[2, 3, 4])
    p.add_argument("--json", dest="json_out")

    p = sub.add_parser("rep-orbit", help="orbit of a single line")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--line", required=True, help='"x0:x1:x2:x3;y0:y1:y2:y3", "(p01:...:p23)" or "[plane];[plane]"')
    return ap


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _report(report: harness.OrbitReport, path: str | None) -> int:
    print(report.summary())
    if path:
        _write(report.dumps(), path)
    return 0 if report.passed else 1


def run(args: argparse.Namespace) -> int:
    if args.command == "census":
        counts = harness.census(args.q, args.poly)
        sys.stdout.write(harness.census_csv(args.q, counts))
        return 0
    if args.command == "orbits":
        parts = harness.orbits_cmd(args.q, args.cls, args.method, args.threads, args.poly)
        if args.cls:
            doc = parts[0].to_json(args.dump_members)
        else:
            doc = {"q": args.q, "partitions": [p.to_json(args.dump_members) for p in parts]}
        _write(json.dumps(doc, indent=2, sort_keys=True), args.out)
        return 0
    if args.command == "verify":
        report = harness.verify(args.q, threads=args.threads, rho=args.rho, method=args.method)
        return _report(report, args.json_out)
    if args.command == "small-q":
        return _report(harness.small_q(args.q), args.json_out)
    if args.command == "rep-orbit":
        print(json.dumps(harness.rep_orbit(args.q, args.line), indent=2))
        return 0
    raise AssertionError(args.command)  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (harness.UnsupportedField, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
