"""Demand-driven evaluation: warehouse, communication procedures, engine."""

from .cp import Demand, NullCP, SocketCP, ThreadedCP, WorkerServer, make_cp
from .engine import Engine, RunReport, run
from .evaluator import Evaluator
from .warehouse import Warehouse, gc

__all__ = ["Demand", "Engine", "Evaluator", "NullCP", "RunReport", "SocketCP",
           "ThreadedCP", "Warehouse", "WorkerServer", "gc", "make_cp", "run"]
