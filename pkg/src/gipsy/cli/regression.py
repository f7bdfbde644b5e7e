"""regression: compile and run the program corpus, diffing against expected output.

Layout of a corpus directory::

    <root>/<dir>/<case>.ipl            program
    <root>/<dir>/expected/<case>.gipc  compiler transcript
    <root>/<dir>/expected/<case>.gee   run transcript (absent if compiling fails)
    <root>/<dir>/current/...           written by every run

where ``<dir>`` is one of gipl, indexical, jlucid, objective, gipsy.
"""

from __future__ import annotations

import difflib
import os
import shutil
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from ..compiler import compile_source
from ..core.errors import GipsyError
from ..eduction.engine import Engine
from ..semantics.geer import deserialize, serialize
from .common import (EXIT_FAIL, EXIT_OK, ArgParser, Usage, Writer, debug, debug_enabled,
                     diagnose, error_lines, report_lines, run_tool)

DIRS = ("gipl", "indexical", "jlucid", "objective", "gipsy")
DIALECT = {"gipl": "gipl", "indexical": "indexical", "jlucid": "jlucid",
           "objective": "objective", "gipsy": None}
GROUPS = {"gipl": ("gipl",), "indexical": ("indexical",),
          "gipsy": ("jlucid", "objective", "gipsy")}


def default_corpus() -> str:
    return str(resources.files("gipsy") / "corpus")


@dataclass
class Case:
    root: str
    group: str
    stem: str

    @property
    def name(self) -> str:
        return f"{self.group}/{self.stem}"

    @property
    def source(self) -> str:
        return os.path.join(self.root, self.group, self.stem + ".ipl")

    def path(self, kind: str, ext: str) -> str:
        return os.path.join(self.root, self.group, kind, self.stem + ext)


@dataclass
class Outcome:
    case: Case
    diffs: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.diffs


def discover(root: str, groups) -> list[Case]:
    cases = []
    for g in groups:
        d = os.path.join(root, g)
        if not os.path.isdir(d):
            continue
        cases += [Case(root, g, f[:-4]) for f in sorted(os.listdir(d)) if f.endswith(".ipl")]
    return cases


def transcripts(case: Case, run: bool) -> dict[str, str]:
    """Compile (and optionally run through a .gipsy round trip) one case."""
    shown = case.name + ".ipl"
    with open(case.source, encoding="utf-8") as fh:
        text = fh.read()
    out: dict[str, str] = {}
    try:
        prog = compile_source(text, dialect=DIALECT[case.group], filename=shown,
                              base_dir=os.path.dirname(case.source))
    except GipsyError as exc:
        out[".gipc"] = diagnose(exc, shown) + "\nfailed\n"
        return out
    data = serialize(prog)
    out[".gipsy"] = data
    out[".gipc"] = "".join(w + "\n" for w in prog.warnings) + f"ok: {len(prog.asts)} tree(s)\n"
    if run:
        try:
            loaded = deserialize(data)
            with Engine() as engine:
                report = engine.run(loaded)
            lines = report_lines(report) + error_lines(report, shown)
        except GipsyError as exc:
            lines = [diagnose(exc, shown)]
        out[".gee"] = "".join(line + "\n" for line in lines)
    return out


def check(case: Case, run: bool) -> Outcome:
    t0 = time.perf_counter()
    result = Outcome(case)
    produced = transcripts(case, run)
    os.makedirs(os.path.dirname(case.path("current", ".x")), exist_ok=True)
    for ext, body in produced.items():
        mode = "wb" if isinstance(body, bytes) else "w"
        with open(case.path("current", ext), mode, **({} if mode == "wb" else
                                                       {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(body)
    wanted = [".gipc", ".gee"] if run else [".gipc"]
    for ext in wanted:
        exp_path = case.path("expected", ext)
        expected = _read(exp_path)
        actual = produced.get(ext)
        if expected is None and actual is None:
            continue
        if expected != actual:
            result.diffs.append("".join(difflib.unified_diff(
                (expected or "").splitlines(keepends=True),
                (actual or "").splitlines(keepends=True),
                fromfile=os.path.relpath(exp_path, case.root),
                tofile=os.path.relpath(case.path("current", ext), case.root))))
    result.seconds = time.perf_counter() - t0
    return result


def _read(path: str) -> str | None:
    try:
        with open(path, "rb") as fh:
            return fh.read().decode("utf-8")
    except FileNotFoundError:
        return None


def bless(outcomes) -> None:
    """Copy current transcripts over the expected ones."""
    for o in outcomes:
        os.makedirs(os.path.dirname(o.case.path("expected", ".x")), exist_ok=True)
        for ext in (".gipc", ".gee"):
            src, dst = o.case.path("current", ext), o.case.path("expected", ext)
            if os.path.exists(src):
                shutil.copyfile(src, dst)
            elif os.path.exists(dst):
                os.remove(dst)


def run_suite(root: str, groups, run: bool, parallel: bool, workers: int | None = None):
    cases = discover(root, groups)
    for c in cases:  # stale transcripts must not satisfy a later comparison
        for ext in (".gipc", ".gee", ".gipsy"):
            p = c.path("current", ext)
            if os.path.exists(p):
                os.remove(p)
    if parallel:
        with ThreadPoolExecutor(workers or os.cpu_count() or 4) as pool:
            return list(pool.map(lambda c: check(c, run), cases))
    return [check(c, run) for c in cases]


def build_parser() -> ArgParser:
    p = ArgParser(prog="regression", description="Diff-based regression over the corpus.")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--sequential", action="store_true", help="one case at a time (default)")
    mode.add_argument("--parallel", action="store_true", help="cases on a worker pool")
    p.add_argument("--gipl", action="store_true", help="GIPL cases")
    p.add_argument("--indexical", action="store_true", help="Indexical Lucid cases")
    p.add_argument("--gipsy", action="store_true", help="hybrid cases (JLucid, Objective, mixed)")
    p.add_argument("--gee", action="store_true", help="also run the compiled programs")
    p.add_argument("--all", action="store_true", help="every case, compiled and run (default)")
    p.add_argument("--directory", metavar="PATH", help="corpus root (default: bundled corpus)")
    p.add_argument("--bless", action="store_true",
                   help="overwrite expected transcripts with the current ones")
    p.add_argument("--debug", action="store_true", help="per-case timings on stderr")
    return p


def _main(argv) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    opts = build_parser().parse_args(argv)
    root = opts.directory or default_corpus()
    if not os.path.isdir(root):
        raise Usage(f"--directory: {root} is not a directory")
    picked = [g for g in GROUPS if getattr(opts, g)]
    everything = opts.all or not picked
    groups = DIRS if everything else tuple(d for g in picked for d in GROUPS[g])
    run = opts.gee or everything
    dbg = debug_enabled(opts.debug)
    outcomes = run_suite(root, groups, run, opts.parallel)
    out = Writer()
    for o in outcomes:
        lines = [f"{'PASS' if o.passed else 'FAIL'} {o.case.name}"]
        for d in o.diffs:
            lines += d.rstrip("\n").split("\n")
        out.lines(lines)
        debug(dbg, f"{o.case.name}: {o.seconds:.3f}s")
    if opts.bless:
        bless(outcomes)
        out.lines([f"blessed {len(outcomes)} case(s)"])
        return EXIT_OK
    failed = sum(not o.passed for o in outcomes)
    out.lines([f"{len(outcomes) - failed} passed, {failed} failed"])
    return EXIT_OK if failed == 0 and outcomes else EXIT_FAIL


def main(argv=None) -> int:
    return run_tool(_main, argv)


if __name__ == "__main__":
    sys.exit(main())
