"""gee: evaluate compiled `.gipsy` programs."""

from __future__ import annotations

import sys
import time

from ..core.errors import GipsyError
from ..eduction.cp import make_cp
from ..eduction.engine import Engine
from ..host.builtins import standard_registry
from ..host.manifest import load_manifest
from ..semantics.geer import deserialize
from .common import (EXIT_FAIL, EXIT_OK, ArgParser, Usage, Writer, debug, debug_enabled,
                     diagnose, error_lines, reject_absent_transports, report_lines, run_tool)


def _capacity(text: str):
    if text.lower() in ("inf", "unbounded", "none"):
        return None
    try:
        n = int(text)
    except ValueError:
        raise Usage(f"--warehouse-capacity: not a number: {text!r}") from None
    if n < 0:
        raise Usage("--warehouse-capacity must be >= 0")
    return n


def build_parser() -> ArgParser:
    p = ArgParser(prog="gee", description="Run compiled GIPSY programs and print "
                  "one 'astIndex: value' line per tree.")
    p.add_argument("inputs", nargs="*", help=".gipsy files")
    p.add_argument("--stdin", action="store_true", help="read one program from standard input")
    p.add_argument("--threaded", action="store_true",
                   help="evaluate trees concurrently and run host calls on a thread pool")
    p.add_argument("--socket", action="store_true",
                   help="send host calls to loopback socket workers")
    p.add_argument("--rmi-analog", choices=["socket"], help="same as --socket")
    p.add_argument("--workers", type=int, default=2, help="socket workers to start")
    p.add_argument("--debug", action="store_true", help="verbose diagnostics on stderr")
    p.add_argument("--warehouse-capacity", default="inf", metavar="N",
                   help="warehouse entries kept (0 disables caching; default unbounded)")
    p.add_argument("--registry", action="append", default=[], metavar="PATH",
                   help="load an extra host manifest (repeatable)")
    return p


def _load(path):
    if path is None:
        return sys.stdin.buffer.read(), "<stdin>"
    with open(path, "rb") as fh:
        return fh.read(), path


def run_one(path, opts, registry, out: Writer, dbg: bool) -> bool:
    try:
        data, name = _load(path)
    except OSError as exc:
        sys.stderr.write(f"{path}: cannot read: {exc.strerror}\n")
        return False
    try:
        prog = deserialize(data, registry)
    except GipsyError as exc:
        sys.stderr.write(diagnose(exc, name) + "\n")
        return False
    cpkind = "socket" if opts.socket or opts.rmi_analog else (
        "threaded" if opts.threaded else "null")
    kw = {"workers": opts.workers} if cpkind == "socket" else {}
    t0 = time.perf_counter()
    try:
        with Engine(capacity=_capacity(opts.warehouse_capacity), threaded=opts.threaded,
                    cp=make_cp(cpkind, prog.registry, **kw)) as engine:
            report = engine.run(prog)
            stats = engine.cp.stats.report()
    except GipsyError as exc:
        sys.stderr.write(diagnose(exc, name) + "\n")
        return False
    out.lines(report_lines(report))
    if report.errors:
        sys.stderr.write("\n".join(error_lines(report, name)) + "\n")
    debug(dbg, f"{name}: {len(prog.asts)} tree(s) in {time.perf_counter() - t0:.4f}s, "
               f"rule applications {report.rule_applications}, host calls "
               f"{report.host_calls}")
    debug(dbg, f"warehouse {engine.warehouse.counters()}")
    debug(dbg, f"workers {stats}")
    return report.ok


def _main(argv) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    reject_absent_transports(argv)
    opts = build_parser().parse_args(argv)
    if opts.stdin and opts.inputs:
        raise Usage("--stdin takes no input files")
    if not opts.stdin and not opts.inputs:
        raise Usage("no input files (use --stdin to read standard input)")
    if opts.workers < 1:
        raise Usage("--workers must be >= 1")
    _capacity(opts.warehouse_capacity)
    dbg = debug_enabled(opts.debug)
    registry = standard_registry()
    try:
        for path in opts.registry:
            added = load_manifest(registry, path)
            debug(dbg, f"manifest {path}: {len(added)} entr(ies)")
    except GipsyError as exc:
        sys.stderr.write(diagnose(exc, opts.registry[-1]) + "\n")
        return EXIT_FAIL
    out = Writer()
    paths = [None] if opts.stdin else opts.inputs
    ok = [run_one(p, opts, registry, out, dbg) for p in paths]
    return EXIT_OK if all(ok) else EXIT_FAIL


def main(argv=None) -> int:
    return run_tool(_main, argv)


if __name__ == "__main__":
    sys.exit(main())
