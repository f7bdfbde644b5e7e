"""Top-level driver: evaluate every tree of a program."""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field

from ..core.context import EMPTY
from ..core.errors import DepthExceeded, EvaluationFailed, GipsyError
from .cp import make_cp
from .evaluator import DEFAULT_DEPTH, Evaluator
from .warehouse import Warehouse

STACK_BYTES = 1 << 30
_stack_lock = threading.Lock()


def in_big_stack(fn, *args):
    """Run ``fn`` in a thread with a deep stack; re-raise its exception here."""
    box: dict = {}

    def body():
        try:
            box["value"] = fn(*args)
        except BaseException as exc:  # handed back to the caller
            box["error"] = exc

    t = start_big_stack(body)
    t.join()
    if "error" in box:
        raise box["error"]
    return box.get("value")


def start_big_stack(target) -> threading.Thread:
    with _stack_lock:
        old = threading.stack_size()
        threading.stack_size(STACK_BYTES)
        try:
            t = threading.Thread(target=target, name="gipsy-eval", daemon=True)
            t.start()
        finally:
            threading.stack_size(old)
    return t


def _ensure_recursion(depth_limit: int) -> None:
    need = depth_limit * 4 + 2000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


@dataclass
class RunReport:
    results: list = field(default_factory=list)  # [(astIndex, Value)]
    errors: list = field(default_factory=list)  # [(astIndex, GipsyError)]
    outputs: dict = field(default_factory=dict)  # astIndex -> [lines]
    rule_applications: int = 0
    host_calls: int = 0

    @property
    def ok(self) -> bool:
        return not self.errors


class Engine:
    """Evaluates programs against one warehouse and one communication procedure."""

    def __init__(self, registry=None, cp=None, warehouse: Warehouse | None = None,
                 capacity: int | None = None, depth_limit: int = DEFAULT_DEPTH,
                 threaded: bool = False, cpkind: str | None = None):
        self.registry = registry
        self.cp = cp
        self.cpkind = cpkind
        self.warehouse = warehouse if warehouse is not None else Warehouse(capacity)
        self.depth_limit = depth_limit
        self.threaded = threaded

    def _cp_for(self, prog):
        if self.cp is None:
            kind = self.cpkind or ("threaded" if self.threaded else prog.cpkind)
            self.cp = make_cp(kind, self.registry or prog.registry)
        return self.cp

    def run(self, prog) -> RunReport:
        _ensure_recursion(self.depth_limit)
        cp = self._cp_for(prog)
        cp.open()
        report = RunReport()
        evals = [Evaluator(prog, cp, self.warehouse, self.depth_limit, tag=i)
                 for i in range(len(prog.asts))]
        outcome: dict[int, tuple] = {}

        def one(i):
            try:
                outcome[i] = ("ok", evals[i].evaluate(prog.asts[i], EMPTY))
            except GipsyError as exc:
                outcome[i] = ("error", exc)
            except RecursionError:
                outcome[i] = ("error", _depth_error(self.depth_limit))

        if self.threaded and len(prog.asts) > 1:
            threads = [start_big_stack(lambda i=i: one(i)) for i in range(len(prog.asts))]
            for t in threads:
                t.join()
        else:
            in_big_stack(lambda: [one(i) for i in range(len(prog.asts))])
        for i, ev in enumerate(evals):
            status, val = outcome[i]
            (report.results if status == "ok" else report.errors).append((i, val))
            report.outputs[i] = ev.output
            report.rule_applications += ev.rule_applications
            report.host_calls += ev.host_calls
        return report

    def close(self):
        if self.cp is not None:
            self.cp.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _depth_error(limit):
    return DepthExceeded(f"evaluation depth exceeded the interpreter stack (limit {limit})")


def run(prog, **opts) -> list:
    """Evaluate ``prog``; return [(astIndex, Value)] or raise EvaluationFailed."""
    with Engine(**opts) as engine:
        report = engine.run(prog)
    if report.errors:
        raise EvaluationFailed(report.errors, report.results)
    return report.results
