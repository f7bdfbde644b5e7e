"""Pieces shared by the command-line tools."""

from __future__ import annotations

import argparse
import os
import sys
import threading

from ..core.errors import EvaluationFailed, GipsyError
from ..core.values import render

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# transports the original toolchain offered and this build does not
ABSENT_TRANSPORTS = ("--rmi", "--jini", "--dcom", "--corba", "--dfg")


class Usage(Exception):
    """Bad command line; reported with exit status 2."""


class ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise Usage(message)

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


def reject_absent_transports(argv: list[str]) -> None:
    for arg in argv:
        flag = arg.split("=", 1)[0]
        if flag in ABSENT_TRANSPORTS:
            raise Usage(f"{flag}: unsupported in this build")


def debug_enabled(flag: bool) -> bool:
    return flag or os.environ.get("GIPSY_DEBUG", "") not in ("", "0")


class Writer:
    """Serializes whole lines onto one stream."""

    def __init__(self, stream=None):
        self.stream = stream or sys.stdout
        self._lock = threading.Lock()

    def lines(self, lines) -> None:
        text = "".join(f"{line}\n" for line in lines)
        if not text:
            return
        with self._lock:
            self.stream.write(text)
            self.stream.flush()


def report_lines(report) -> list[str]:
    """Host output of each tree, followed by its `astIndex: value` line."""
    out = []
    values = dict(report.results)
    for i in sorted(report.outputs):
        out.extend(report.outputs[i])
        if i in values:
            out.append(f"{i}: {render(values[i])}")
    return out


def error_lines(report, filename: str) -> list[str]:
    return [f"{filename}: ast {i}: {exc.kind}: {exc}" for i, exc in report.errors]


def diagnose(exc: BaseException, filename: str) -> str:
    if isinstance(exc, EvaluationFailed):
        return "\n".join(f"{filename}: ast {i}: {e.kind}: {e}" for i, e in exc.errors)
    if isinstance(exc, GipsyError):
        return f"{exc.diagnostic(filename)}"
    return f"{filename}: {type(exc).__name__}: {exc}"


def debug(enabled: bool, msg: str) -> None:
    if enabled:
        sys.stderr.write(f"[debug] {msg}\n")


def run_tool(main_body, argv) -> int:
    """Shared top-level guard turning usage problems into exit status 2."""
    try:
        return main_body(argv)
    except Usage as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
