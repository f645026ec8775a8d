"""Command-line interface: `symcalc <subcommand> ...`."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import Polarity, Program, Strategy
from .diagnostics import ParseError
from .evalorder import DoubleShiftError, evaltrans, full_defunc, full_refunc, remove_double_shifts, roundtrip
from .machine import DEFAULT_FUEL, trace
from .modes import StrategyMode
from .parser import parse_program
from .polarity import TransformError, xfun
from .printer import pretty_print
from .typecheck import check_program

EXIT_OK, EXIT_PARSE, EXIT_TYPE, EXIT_TRANSFORM, EXIT_STUCK, EXIT_FUEL, EXIT_PROPERTY = 0, 2, 3, 4, 5, 6, 7

POLAR_WARNING = (
    "warning: under polar evaluation, flipping a type's polarity also flips its "
    "evaluation order, so this transformation may change the program's behaviour"
)


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _err(msg: str):
    print(msg, file=sys.stderr)


def _load(path: str) -> Program:
    if path == "-":
        text, name = sys.stdin.read(), "<stdin>"
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            _err(f"error: cannot read {path}: {exc.strerror}")
            raise _Exit(EXIT_PARSE) from None
        except UnicodeDecodeError:
            _err(f"error: {path} is not valid UTF-8")
            raise _Exit(EXIT_PARSE) from None
        name = path
    try:
        return parse_program(text, filename=name)
    except ParseError as exc:
        for d in exc.diagnostics:
            _err(d.render())
        raise _Exit(EXIT_PARSE) from None


def _typecheck(program: Program, mode: StrategyMode):
    diagnostics = check_program(program, mode)
    for d in diagnostics:
        _err(d.render())
    if diagnostics:
        raise _Exit(EXIT_TYPE)


def _mode(text: str) -> StrategyMode:
    try:
        return StrategyMode.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid mode {text!r} (choose from {', '.join(m.value for m in StrategyMode)})"
        ) from None


def _input(args) -> Program:
    program = _load(args.file)
    _typecheck(program, args.mode)
    return program


# -- subcommands ------------------------------------------------------------


def cmd_check(args) -> int:
    program = _input(args)
    print(f"ok: {len(program.declarations)} declaration(s), well-formed under {args.mode.value}")
    return EXIT_OK


def cmd_run(args) -> int:
    program = _input(args)
    t = trace(program, args.mode, program.main, args.fuel)
    if args.trace and args.format == "json":
        print(t.to_json_lines())
    elif args.trace:
        print(t.to_text())
    else:
        print(t.outcome)
    if args.format == "text" and t.outcome.kind == "stuck":
        _err(f"stuck: {t.outcome.reason}")
    return {"completed": EXIT_OK, "stuck": EXIT_STUCK, "fuel-exhausted": EXIT_FUEL}[t.outcome.kind]


def _xfun_toward(args, target: Polarity) -> int:
    program = _input(args)
    decl = program.types.get(args.type)
    if decl is None:
        _err(f"error: unknown type {args.type!r}")
        return EXIT_TRANSFORM
    if decl.polarity is target:
        _err(f"error: {args.type} is already a {target.value} type")
        return EXIT_TRANSFORM
    if args.mode is StrategyMode.POLAR:
        _err(POLAR_WARNING)
        if not args.force:
            _err("error: refusing under --mode polar without --force")
            return EXIT_TRANSFORM
    out, report = xfun(program, args.type)
    _err(str(report))
    print(pretty_print(out), end="")
    return EXIT_OK


def cmd_defunc(args) -> int:
    return _xfun_toward(args, Polarity.DATA)


def cmd_refunc(args) -> int:
    return _xfun_toward(args, Polarity.CODATA)


def cmd_shift(args) -> int:
    program = _input(args)
    out = evaltrans(program, args.type, Strategy(args.to))
    _err(f"shift {args.type}: -> {args.to}")
    print(pretty_print(out), end="")
    return EXIT_OK


def cmd_full(args) -> int:
    program = _input(args)
    fn = full_refunc if args.command == "full-refunc" else full_defunc
    out, report = fn(program, args.type)
    _err(str(report))
    print(pretty_print(out), end="")
    return EXIT_OK


def cmd_simplify(args) -> int:
    program = _input(args)
    out = remove_double_shifts(program, args.type)
    print(pretty_print(out), end="")
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    program = _input(args)
    out, report = roundtrip(program, args.type)
    if args.verbose:
        _err(str(report))
    if report.identical:
        print("roundtrip: identical")
        return EXIT_OK
    print("roundtrip: differs")
    _err(pretty_print(out))
    return EXIT_PROPERTY


def cmd_harness(args) -> int:
    from .properties import run_harness

    report = run_harness(seeds=args.seeds, fuel=args.fuel, start=args.start)
    print(report.table())
    for line in report.failures[:20]:
        _err(line)
    return EXIT_OK if report.ok else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symcalc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name, help_text, func, typed=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="program file (.sym), or - for standard input")
        p.add_argument("--mode", type=_mode, default=StrategyMode.NOMINAL,
                       help="evaluation order: global-cbv, global-cbn, polar or nominal (default)")
        if typed:
            p.add_argument("--type", required=True, help="name of the type to transform")
        p.set_defaults(func=func)
        return p

    with_file("check", "typecheck a program", cmd_check)
    run = with_file("run", "evaluate main", cmd_run)
    run.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    run.add_argument("--trace", action="store_true", help="print every step")
    run.add_argument("--format", choices=("text", "json"), default="text", help="trace format")
    for name, text in (("defunc", "codata to data (core defunctionalization)"),
                       ("refunc", "data to codata (core refunctionalization)")):
        p = with_file(name, text, cmd_defunc if name == "defunc" else cmd_refunc, typed=True)
        p.add_argument("--force", action="store_true", help="allow the transform under --mode polar")
    shift = with_file("shift", "change a type's evaluation order", cmd_shift, typed=True)
    shift.add_argument("--to", choices=("cbv", "cbn"), required=True)
    with_file("full-refunc", "cbv data to cbn codata", cmd_full, typed=True)
    with_file("full-defunc", "cbn codata to cbv data", cmd_full, typed=True)
    with_file("simplify", "remove double-shift artifacts", cmd_simplify, typed=True)
    rt = with_file("roundtrip", "check that the full round trip restores the program", cmd_roundtrip, typed=True)
    rt.add_argument("-v", "--verbose", action="store_true")

    harness = sub.add_parser("harness", help="run the property harness over generated programs")
    harness.add_argument("--seeds", type=int, default=100)
    harness.add_argument("--fuel", type=int, default=1000)
    harness.add_argument("--start", type=int, default=0, help="first seed")
    harness.set_defaults(func=cmd_harness)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "fuel", 0) < 0:
        _err("error: --fuel must be non-negative")
        return EXIT_PARSE
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code
    except DoubleShiftError as exc:
        _err(f"error: {exc}")
        return EXIT_TRANSFORM
    except TransformError as exc:
        _err(f"error: {exc}")
        return EXIT_TRANSFORM


if __name__ == "__main__":
    sys.exit(main())
