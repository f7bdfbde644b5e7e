"""gipc: compile Lucid-family sources into `.gipsy` programs."""

from __future__ import annotations

import os
import sys
import time

from ..compiler import compile_source
from ..core.errors import GipsyError
from ..eduction.engine import Engine
from ..frontend.printer import pretty
from ..semantics.geer import serialize
from .common import (EXIT_FAIL, EXIT_OK, ArgParser, Usage, Writer, debug, debug_enabled,
                     diagnose, error_lines, reject_absent_transports, report_lines, run_tool)


def build_parser() -> ArgParser:
    p = ArgParser(prog="gipc", description="Compile GIPSY programs. Every input file is "
                  "an independent program and yields its own .gipsy file.")
    p.add_argument("inputs", nargs="*", help="source files (.ipl)")
    p.add_argument("--stdin", action="store_true", help="read one program from standard input")
    force = p.add_mutually_exclusive_group()
    force.add_argument("-G", "--gipl", dest="dialect", action="store_const", const="gipl",
                       help="treat unsegmented sources as GIPL")
    force.add_argument("-S", "--indexical", dest="dialect", action="store_const",
                       const="indexical", help="treat unsegmented sources as Indexical Lucid")
    force.add_argument("--jlucid", dest="dialect", action="store_const", const="jlucid",
                       help="treat unsegmented sources as JLucid")
    force.add_argument("--objective", dest="dialect", action="store_const", const="objective",
                       help="treat unsegmented sources as Objective Lucid")
    tr = p.add_mutually_exclusive_group()
    tr.add_argument("-T", "--translate", dest="translate", action="store_const", const=True,
                    help="rewrite stream operators into @ and # (default)")
    tr.add_argument("--disable-translate", dest="translate", action="store_const", const=False,
                    help="keep the tree as parsed; leftover stream operators are errors")
    p.add_argument("--warnings-as-errors", action="store_true")
    p.add_argument("--gee", action="store_true", help="run each program right after compiling")
    p.add_argument("--debug", action="store_true", help="verbose diagnostics on stderr")
    return p


def _source(path: str | None) -> tuple[str, str, str]:
    """(text, display name, output path)."""
    if path is None:
        return sys.stdin.read(), "<stdin>", "stdin.gipsy"
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stem, _ = os.path.splitext(path)
    return text, path, stem + ".gipsy"


def compile_one(path, opts, out: Writer, dbg: bool) -> bool:
    try:
        text, name, target = _source(path)
    except OSError as exc:
        sys.stderr.write(f"{path}: cannot read: {exc.strerror}\n")
        return False
    t0 = time.perf_counter()
    try:
        prog = compile_source(text, dialect=opts.dialect, translate=opts.translate,
                              filename=name, warnings_as_errors=opts.warnings_as_errors)
    except GipsyError as exc:
        sys.stderr.write(diagnose(exc, name) + "\n")
        return False
    for w in prog.warnings:
        sys.stderr.write(w + "\n")
    debug(dbg, f"{name}: compiled {len(prog.asts)} tree(s) in "
               f"{time.perf_counter() - t0:.4f}s")
    if dbg:
        for i, ast in enumerate(prog.asts):
            debug(dbg, f"ast {i}:\n{pretty(ast)}")
        for row in prog.dictionary.rows():
            debug(dbg, "dictionary " + " ".join(str(x) for x in row))
    try:
        with open(target, "wb") as fh:
            fh.write(serialize(prog))
    except OSError as exc:
        sys.stderr.write(f"{target}: cannot write: {exc.strerror}\n")
        return False
    debug(dbg, f"wrote {target}")
    if not opts.gee:
        return True
    with Engine() as engine:
        report = engine.run(prog)
    out.lines(report_lines(report))
    if report.errors:
        sys.stderr.write("\n".join(error_lines(report, name)) + "\n")
    debug(dbg, f"rule applications {report.rule_applications}, "
               f"warehouse {engine.warehouse.counters()}")
    return report.ok


def _main(argv) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    reject_absent_transports(argv)
    opts = build_parser().parse_args(argv)
    if opts.stdin and opts.inputs:
        raise Usage("--stdin takes no input files")
    if not opts.stdin and not opts.inputs:
        raise Usage("no input files (use --stdin to read standard input)")
    dbg = debug_enabled(opts.debug)
    out = Writer()
    paths = [None] if opts.stdin else opts.inputs
    ok = [compile_one(p, opts, out, dbg) for p in paths]
    return EXIT_OK if all(ok) else EXIT_FAIL


def main(argv=None) -> int:
    return run_tool(_main, argv)


if __name__ == "__main__":
    sys.exit(main())
