"""Command-line entry point.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 size cap,
64 usage error, 70 internal invariant breach.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fixtures
from .cbd import build_order_effect_system, serialize_cbd
from .errors import GluingError, ParseError
from .lp import DEFAULT_MAX_COLUMNS
from .qorder import quantum_order_model
from .report import CHECKS, AnalysisRequest, UsageError, analyze, load_input, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gluing", description="Exact local-to-global consistency checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="run checks on a scenario or CbD file")
    a.add_argument("file", type=Path)
    a.add_argument("--checks", required=True, help=f"comma-separated subset of {','.join(CHECKS)}")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--max-columns", type=int, default=DEFAULT_MAX_COLUMNS)
    a.add_argument("--timing", action="store_true", help="append per-check wall time (not deterministic)")

    e = sub.add_parser("examples", help="built-in example inputs")
    esub = e.add_subparsers(dest="action", required=True, parser_class=_Parser)
    esub.add_parser("list")
    show = esub.add_parser("show")
    show.add_argument("name")
    write = esub.add_parser("write")
    write.add_argument("name")
    write.add_argument("path", type=Path)

    g = sub.add_parser("gen-qorder", help="write an order-effect file from a state and two projectors")
    g.add_argument("--state", required=True, help="comma-separated entries, e.g. 1,0 or sqrt(2)/2,sqrt(2)/2")
    g.add_argument("--proj-a", required=True, help="row-major projector entries")
    g.add_argument("--proj-b", required=True, help="row-major projector entries")
    g.add_argument("-o", "--output", required=True, type=Path)
    return p


def _analyze(args) -> int:
    req = AnalysisRequest(tuple(_csv(args.checks)), args.format, args.max_columns, args.timing)
    try:
        text = args.file.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {args.file}: {exc.strerror}") from None
    kind, obj = load_input(text)
    sys.stdout.write(render(analyze(obj, req, kind), args.format))
    return 0


def _examples(args) -> int:
    if args.action == "list":
        for name in fixtures.names():
            print(name)
        return 0
    if args.name not in fixtures.EXAMPLES:
        raise UsageError(f"unknown example {args.name!r}; choose from {', '.join(fixtures.names())}")
    body = fixtures.text(args.name)
    if args.action == "show":
        sys.stdout.write(body)
    else:
        args.path.write_text(body, encoding="utf-8")
    return 0


def _gen_qorder(args) -> int:
    data = quantum_order_model(_csv(args.state), _csv(args.proj_a), _csv(args.proj_b))
    args.output.write_text(serialize_cbd(build_order_effect_system(data)), encoding="utf-8")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"analyze": _analyze, "examples": _examples, "gen-qorder": _gen_qorder}[args.command]
    try:
        return handler(args)
    except (GluingError, UsageError) as exc:
        print(f"gluing: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
