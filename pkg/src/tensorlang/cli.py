"""``tl``: check, run, analyze and difftest tensor programs.

Exit codes: 0 success, 1 lexical/parse/type error, 2 I/O or init-store error,
3 difftest mismatch. Diagnostics go to stderr, data to stdout or ``-o``.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from tensorlang.analysis import analyze, dead_code_eliminate
from tensorlang.evaluate import AccessViolation, InitError, Mode, run
from tensorlang.harness import GenConfig, check_simulation
from tensorlang.harness.difftest import MUTATIONS
from tensorlang.padded import run_padded
from tensorlang.storefile import format_store, load_init
from tensorlang.syntax import Program, Qualifier, SyntaxProblem, parse_program, pretty_print
from tensorlang.typecheck import StaticContext, TypeCheckError, check_program

EXIT_OK, EXIT_PROGRAM, EXIT_IO, EXIT_MISMATCH = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise _Fail(EXIT_IO, f"ERROR IO cannot read {path}: {e.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise _Fail(EXIT_IO, f"ERROR IO cannot write {path}: {e.strerror}") from None


def _load(path: str) -> tuple[Program, StaticContext]:
    source = _read(path)
    try:
        p = parse_program(source)
        return p, check_program(p)
    except SyntaxProblem as e:
        raise _Fail(EXIT_PROGRAM, f"ERROR {e.kind} at {e.pos}: {e.message}") from None
    except TypeCheckError as e:
        raise _Fail(EXIT_PROGRAM, str(e)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _lengths(text: str) -> list[int]:
    try:
        Ms = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}") from None
    if not Ms or min(Ms) < 1:
        raise argparse.ArgumentTypeError("vector lengths must be positive")
    return Ms


# --------------------------------------------------------------------------- #
# Subcommands

def cmd_check(args) -> int:
    _load(args.program)
    print("OK")
    return EXIT_OK


def cmd_run(args) -> int:
    if args.dump_padding and args.pad is None:
        raise _Fail(EXIT_IO, "ERROR usage --dump-padding requires --pad")
    p, ctx = _load(args.program)
    names = None
    if args.only_output:
        names = ctx.with_names(Qualifier.OUTPUT)
        if not names:
            raise _Fail(EXIT_IO, "ERROR usage --only-output but the program declares no output variable")
    init = {}
    if args.init is not None:
        try:
            init = load_init(ctx, _read(args.init))
        except InitError as e:
            raise _Fail(EXIT_IO, f"ERROR {type(e).__name__} {e}") from None
    mode = Mode(args.arith)
    try:
        if args.pad is None:
            store = run(p, init, mode)
        else:
            store = run_padded(p, init, args.pad, mode)
    except InitError as e:
        raise _Fail(EXIT_IO, f"ERROR {type(e).__name__} {e}") from None
    except AccessViolation as e:  # unreachable for well-formed programs
        raise _Fail(EXIT_PROGRAM, f"ERROR AccessViolation {e}") from None
    pad = args.pad if args.dump_padding else None
    _write(args.output, format_store(ctx, store, names, pad))
    return EXIT_OK


def cmd_analyze(args) -> int:
    p, _ = _load(args.program)
    report = analyze(p)
    for line in report.lines():
        print(line, file=sys.stderr if args.dce and args.output in (None, "-") else sys.stdout)
    if args.dce:
        _write(args.output, pretty_print(dead_code_eliminate(p)))
    return EXIT_OK


def cmd_difftest(args) -> int:
    if args.mutate is not None and args.mutate not in MUTATIONS:
        raise _Fail(EXIT_IO, f"ERROR usage unknown mutation {args.mutate!r}")
    cfg = GenConfig(seed=args.base_seed, max_rank=args.max_rank, max_extent=args.max_extent,
                    max_statements=args.max_statements)
    report = check_simulation(cfg, args.pad, args.seeds, Mode(args.arith), args.mutate,
                              jobs=args.jobs, timeout=args.timeout,
                              shrink_failures=not args.no_shrink)
    lines = report.lines()
    if args.report is not None:
        _write(args.report, "\n".join(lines) + "\n")
        print(lines[-1])
    else:
        print("\n".join(lines))
    return EXIT_OK if report.passed else EXIT_MISMATCH


# --------------------------------------------------------------------------- #

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    arith = dict(choices=[m.value for m in Mode], default=Mode.CONTROLLED.value,
                 help="arithmetic on undefined values (default: %(default)s)")

    p = sub.add_parser("check", help="parse and type-check a program")
    p.add_argument("program")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="evaluate a program and write the final store")
    p.add_argument("program")
    p.add_argument("--init", metavar="FILE", help="initial store file")
    p.add_argument("--pad", metavar="M", type=_positive, help="evaluate on a store padded to M")
    p.add_argument("-o", "--output", metavar="FILE", help="output store file (default stdout)")
    p.add_argument("--only-output", action="store_true", help="dump output-qualified variables only")
    p.add_argument("--dump-padding", action="store_true", help="also dump padding cells")
    p.add_argument("--arith", **arith)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="report uninitialized uses and dead statements")
    p.add_argument("program")
    p.add_argument("--dce", action="store_true", help="emit the program with dead statements removed")
    p.add_argument("-o", "--output", metavar="FILE", help="where to write the --dce program")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("difftest", help="differential test of padded against reference evaluation")
    p.add_argument("--seeds", type=_positive, default=1000)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--pad", type=_lengths, default=[1, 2, 3, 4, 8], metavar="M,M,...")
    p.add_argument("--mutate", choices=MUTATIONS)
    p.add_argument("--arith", **arith)
    p.add_argument("--report", metavar="FILE", help="write the full report here")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--timeout", type=float, default=60.0, help="seconds per program")
    p.add_argument("--max-rank", type=int, default=3)
    p.add_argument("--max-extent", type=_positive, default=5)
    p.add_argument("--max-statements", type=_positive, default=6)
    p.add_argument("--no-shrink", action="store_true", help="skip minimizing failures")
    p.set_defaults(func=cmd_difftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse usage errors exit 2 already
        return int(e.code or 0)
    try:
        return args.func(args)
    except _Fail as e:
        print(e, file=sys.stderr)
        return e.code
    except ValueError as e:  # e.g. bad GenConfig values
        print(f"ERROR usage {e}", file=sys.stderr)
        return EXIT_IO
    except BrokenPipeError:
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
