"""The ``fha`` command: check, run, extract, eval-lambda and selftest.

Exit codes: 0 success, 1 parse or type error, 2 I/O error, 3 timeout or
lambda budget exceeded, 4 a stuck evaluation (never expected of a
well-typed program).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, TextIO

from . import checker as ck
from . import evaluator as ev
from . import extract as ex
from . import lam as L
from . import parser
from . import stdlib
from . import syntax as s

EXIT_OK, EXIT_ERROR, EXIT_IO, EXIT_BUDGET, EXIT_STUCK = 0, 1, 2, 3, 4
COMMANDS = ("check", "run", "extract", "eval-lambda", "selftest")
TYPE_HEADER = "-- type: "


@dataclass(frozen=True)
class CliConfig:
    command: str
    input_path: Optional[str] = None
    fuel: int = 1_000_000
    lam_budget: int = 1_000_000
    no_prelude: bool = False
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.fuel < 1 or self.lam_budget < 1:
            raise ValueError("--fuel and --lam-budget must be at least 1")


class _IOFailure(Exception):
    pass


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as err:
        raise _IOFailure(f"cannot read {path}: {err}") from err


def _write(path: Optional[str], text: str, stdout: TextIO) -> None:
    if path is None or path == "-":
        stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as err:
        raise _IOFailure(f"cannot write {path}: {err}") from err


def _prelude(cfg: CliConfig) -> s.Program:
    if cfg.no_prelude:
        return s.Program(())
    path = stdlib.prelude_path()
    try:
        return stdlib.prelude(path)
    except OSError as err:
        raise _IOFailure(f"cannot read prelude {path}: {err}") from err


def _load(cfg: CliConfig, stdin: TextIO):
    pre = _prelude(cfg)
    name = "<stdin>" if cfg.input_path == "-" else cfg.input_path
    prog = parser.parse_program(_read(cfg.input_path, stdin), pre, name)
    return pre, prog, ck.check_program(prog, pre, name)


def _main_of(prog: s.Program) -> s.Main:
    if prog.main is None:
        raise ex.ExtractError("program has no main")
    return prog.main


def _cmd_check(cfg, stdin, stdout):
    _load(cfg, stdin)
    stdout.write("ok\n")
    return EXIT_OK


def _cmd_run(cfg, stdin, stdout):
    pre, prog, _ = _load(cfg, stdin)
    _main_of(prog)
    out = ev.run_program(prog, cfg.fuel, pre)
    stdout.write(ev.render_outcome(out) + "\n")
    if isinstance(out, ev.Timeout):
        return EXIT_BUDGET
    return EXIT_STUCK if isinstance(out, ev.Stuck) else EXIT_OK


def _cmd_extract(cfg, stdin, stdout):
    pre, prog, glob = _load(cfg, stdin)
    main = _main_of(prog)
    term = ex.extract_program(prog, pre, glob)
    ty = ck.normalize_type(ck.Context(glob), main.type)
    text = f"{TYPE_HEADER}{parser.pretty_type(ty, pre)}\n{L.print_lam(term)}\n"
    _write(cfg.output_path, text, stdout)
    return EXIT_OK


def _cmd_eval_lambda(cfg, stdin, stdout):
    text = _read(cfg.input_path, stdin)
    term = L.parse_lam(text)
    ty = None
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.startswith(TYPE_HEADER):
        ty = parser.parse_type(first[len(TYPE_HEADER):], _prelude(cfg))
    try:
        nf = L.normalize(term, cfg.lam_budget)
    except L.BudgetExceeded as err:
        stdout.write(f"{err}\n")
        return EXIT_BUDGET
    value = ex.decode_value(nf, ty, budget=cfg.lam_budget) if ty is not None else None
    if value is None or isinstance(value, ex.Unknown):
        b = L.decode_bool(nf, cfg.lam_budget)
        shown = b if b != L.UNKNOWN else L.print_lam(nf)
    else:
        shown = ev.render(value)
    _write(cfg.output_path, shown + "\n", stdout)
    return EXIT_OK


def _cmd_selftest(cfg, stdin, stdout):
    from . import acceptance
    results = acceptance.run_all()
    stdout.write(acceptance.format_table(results) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


_DISPATCH = {"check": _cmd_check, "run": _cmd_run, "extract": _cmd_extract,
             "eval-lambda": _cmd_eval_lambda, "selftest": _cmd_selftest}


def dispatch(cfg: CliConfig, stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None,
             stderr: Optional[TextIO] = None) -> int:
    """Run one command and return its exit status (streams default to the process's)."""
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    try:
        return _DISPATCH[cfg.command](cfg, stdin, stdout)
    except _IOFailure as err:
        stderr.write(f"fha: {err}\n")
        return EXIT_IO
    except (parser.ParseError, ck.FhaTypeError, L.LamParseError, ex.ExtractError) as err:
        stderr.write(f"{err}\n")
        return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fha", description="Effect handler toolchain.")
    sub = ap.add_subparsers(dest="command", required=True)

    def positive(text: str) -> int:
        n = int(text)
        if n < 1:
            raise argparse.ArgumentTypeError("must be at least 1")
        return n

    for name in COMMANDS:
        p = sub.add_parser(name)
        if name != "selftest":
            p.add_argument("input", help="source file, or - for stdin")
        p.add_argument("--fuel", type=positive, default=1_000_000)
        p.add_argument("--lam-budget", type=positive, default=1_000_000)
        p.add_argument("--no-prelude", action="store_true")
        p.add_argument("-o", dest="output", default=None, help="output file, or - for stdout")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = CliConfig(args.command, getattr(args, "input", None), args.fuel, args.lam_budget,
                    args.no_prelude, args.output)
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
