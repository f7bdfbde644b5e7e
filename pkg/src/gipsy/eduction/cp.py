"""Communication procedures: how functional demands reach a worker.

NullCP runs the demand in the calling thread, ThreadedCP on a local thread
pool, SocketCP on worker servers over loopback TCP. Socket frames are a
4-byte big-endian length followed by a UTF-8 JSON payload.
"""

from __future__ import annotations

import itertools
import json
import socket
import struct
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field

from ..core import errors as E
from ..core.context import Context
from ..core.values import Value, decode_value, encode_value
from ..host.registry import HostRegistry

_ids = itertools.count(1)


@dataclass(frozen=True)
class Demand:
    kind: str  # Intensional | Functional
    name: str
    args: tuple = ()
    context: Context = field(default_factory=Context)
    id: int = field(default_factory=lambda: next(_ids))


@dataclass
class WorkerRecord:
    liveness: str = "alive"  # alive | unresponsive | dead
    demands_served: int = 0
    total_time: float = 0.0

    @property
    def mean_response(self) -> float:
        return self.total_time / self.demands_served if self.demands_served else 0.0


class WorkerStats:
    def __init__(self):
        self.per_worker: dict[str, WorkerRecord] = {}
        self._lock = threading.Lock()

    def add(self, wid: str) -> None:
        with self._lock:
            self.per_worker.setdefault(wid, WorkerRecord())

    def served(self, wid: str, seconds: float) -> None:
        with self._lock:
            r = self.per_worker.setdefault(wid, WorkerRecord())
            r.demands_served += 1
            r.total_time += seconds
            r.liveness = "alive"

    def mark(self, wid: str, liveness: str) -> None:
        with self._lock:
            self.per_worker.setdefault(wid, WorkerRecord()).liveness = liveness

    def total_served(self) -> int:
        return sum(r.demands_served for r in self.per_worker.values())

    def report(self) -> dict:
        return {w: {"liveness": r.liveness, "demandsServed": r.demands_served,
                    "meanResponse": r.mean_response} for w, r in self.per_worker.items()}


def execute(registry: HostRegistry, name: str, args, context) -> tuple[Value, list]:
    """The ripe function executor: run one functional demand."""
    return registry.invoke(name, args, context)


class NullCP:
    """Executes demands directly in the generator's thread."""

    kind = "Null"

    def __init__(self, registry: HostRegistry):
        self.registry = registry
        self.stats = WorkerStats()
        self.stats.add("local")

    def open(self):
        return self

    def dispatch(self, dm: Demand):
        t0 = time.perf_counter()
        out = execute(self.registry, dm.name, dm.args, dm.context)
        self.stats.served("local", time.perf_counter() - t0)
        return out

    def close(self):
        pass

    def __enter__(self):
        return self.open()

    def __exit__(self, *exc):
        self.close()


class ThreadedCP(NullCP):
    """Runs demands on a local pool of worker threads."""

    kind = "Threaded"

    def __init__(self, registry: HostRegistry, workers: int = 4):
        super().__init__(registry)
        self.workers = workers
        self.pool: ThreadPoolExecutor | None = None

    def open(self):
        if self.pool is None:
            self.pool = ThreadPoolExecutor(self.workers, thread_name_prefix="gipsy-worker")
        return self

    def dispatch(self, dm: Demand):
        self.open()
        t0 = time.perf_counter()
        out = self.pool.submit(execute, self.registry, dm.name, dm.args, dm.context).result()
        self.stats.served("local", time.perf_counter() - t0)
        return out

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None


# wire format ---------------------------------------------------------------

def send_frame(sock: socket.socket, payload: dict) -> None:
    data = json.dumps(payload, separators=(",", ":")).encode("utf-8")
    sock.sendall(struct.pack(">I", len(data)) + data)


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("connection closed")
        buf += chunk
    return bytes(buf)


def recv_frame(sock: socket.socket) -> dict:
    (n,) = struct.unpack(">I", _recv_exact(sock, 4))
    return json.loads(_recv_exact(sock, n).decode("utf-8"))


def encode_demand(dm: Demand) -> dict:
    return {"demandId": dm.id, "stName": dm.name,
            "args": [encode_value(a) for a in dm.args],
            "context": [[d, t] for d, t in dm.context.key]}


def _error_from(kind: str, message: str) -> E.GipsyError:
    cls = getattr(E, kind, None)
    if isinstance(cls, type) and issubclass(cls, E.GipsyError):
        try:
            return cls(message)
        except TypeError:
            pass
    return E.HostError(f"{kind}: {message}")


class WorkerServer:
    """A worker listening on loopback; serves demands against a registry."""

    def __init__(self, registry: HostRegistry, host: str = "127.0.0.1", port: int = 0):
        self.registry = registry
        self.sock = socket.create_server((host, port))
        self.address = self.sock.getsockname()
        self._closed = threading.Event()
        self._conns: list[socket.socket] = []
        self._thread = threading.Thread(target=self._accept, daemon=True,
                                        name=f"gipsy-worker-{self.address[1]}")
        self._thread.start()

    def _accept(self):
        while not self._closed.is_set():
            try:
                conn, _ = self.sock.accept()
            except OSError:
                return
            self._conns.append(conn)
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn: socket.socket):
        with conn:
            while True:
                try:
                    req = recv_frame(conn)
                except (ConnectionError, OSError, ValueError):
                    return
                send_frame(conn, self.handle(req))

    def handle(self, req: dict) -> dict:
        did = req.get("demandId")
        try:
            args = [decode_value(a) for a in req["args"]]
            ctx = Context({d: t for d, t in req.get("context", [])})
            value, lines = execute(self.registry, req["stName"], args, ctx)
            return {"demandId": did, "status": "ok", "value": encode_value(value),
                    "output": lines}
        except E.GipsyError as exc:
            return {"demandId": did, "status": "error", "kind": exc.kind,
                    "message": exc.message, "output": []}
        except Exception as exc:  # malformed request
            return {"demandId": did, "status": "error", "kind": "HostError",
                    "message": f"{type(exc).__name__}: {exc}", "output": []}

    def close(self):
        self._closed.set()
        try:
            self.sock.close()
        except OSError:
            pass
        for c in self._conns:
            try:
                c.shutdown(socket.SHUT_RDWR)
                c.close()
            except OSError:
                pass


class _Connection:
    def __init__(self, wid: str, sock: socket.socket, cp: "SocketCP"):
        self.wid = wid
        self.sock = sock
        self.cp = cp
        self.pending: dict[int, Future] = {}
        self.lock = threading.Lock()
        self.alive = True
        self.reader = threading.Thread(target=self._read, daemon=True, name=f"gipsy-cp-{wid}")
        self.reader.start()

    def _read(self):
        while True:
            try:
                resp = recv_frame(self.sock)
            except (ConnectionError, OSError, ValueError) as exc:
                self._fail(f"{type(exc).__name__}: {exc}")
                return
            fut = self.pending.pop(resp.get("demandId"), None)
            if fut is not None and not fut.done():  # duplicates are discarded
                fut.set_result(resp)

    def _fail(self, cause: str):
        self.alive = False
        self.cp.stats.mark(self.wid, "dead")
        for fut in list(self.pending.values()):
            if not fut.done():
                fut.set_exception(E.CommunicationError("receive", cause))
        self.pending.clear()

    def submit(self, dm: Demand) -> Future:
        fut: Future = Future()
        self.pending[dm.id] = fut
        try:
            with self.lock:
                send_frame(self.sock, encode_demand(dm))
        except OSError as exc:
            self.pending.pop(dm.id, None)
            self._fail(str(exc))
            raise E.CommunicationError("send", str(exc)) from None
        return fut

    def close(self):
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


class SocketCP:
    """Dispatches demands round-robin to loopback worker servers.

    Without explicit ``addresses`` it starts ``workers`` in-process servers.
    A demand whose worker fails is retried on another one, up to ``retries``
    times, before WorkerDead is raised.
    """

    kind = "Socket"

    def __init__(self, registry: HostRegistry | None = None, workers: int = 2,
                 addresses=None, retries: int = 2, timeout: float = 30.0):
        self.registry = registry
        self.n_workers = workers
        self.addresses = list(addresses) if addresses else None
        self.retries = retries
        self.timeout = timeout
        self.stats = WorkerStats()
        self.servers: list[WorkerServer] = []
        self.conns: list[_Connection] = []
        self._rr = itertools.count()
        self._opened = False

    def open(self):
        if self._opened:
            return self
        addrs = self.addresses
        if addrs is None:
            self.servers = [WorkerServer(self.registry) for _ in range(self.n_workers)]
            addrs = [s.address for s in self.servers]
        for i, addr in enumerate(addrs):
            wid = f"worker-{i}"
            try:
                sock = socket.create_connection(addr, timeout=self.timeout)
            except ConnectionRefusedError:
                self.close()
                raise E.CommunicationError("open", "refused") from None
            except OSError as exc:
                self.close()
                raise E.CommunicationError("open", str(exc)) from None
            sock.settimeout(None)
            self.conns.append(_Connection(wid, sock, self))
            self.stats.add(wid)
        self._opened = True
        return self

    def _pick(self, exclude) -> _Connection | None:
        live = [c for c in self.conns if c.alive and c.wid not in exclude]
        if not live:
            return None
        return live[next(self._rr) % len(live)]

    def dispatch(self, dm: Demand):
        self.open()
        tried: set = set()
        last = None
        for _ in range(self.retries + 1):
            conn = self._pick(tried)
            if conn is None:
                break
            tried.add(conn.wid)
            t0 = time.perf_counter()
            try:
                resp = conn.submit(dm).result(self.timeout)
            except E.CommunicationError as exc:
                last = exc
                continue
            except FutureTimeout:
                conn.pending.pop(dm.id, None)
                self.stats.mark(conn.wid, "unresponsive")
                last = E.CommunicationError("receive", "timeout")
                continue
            self.stats.served(conn.wid, time.perf_counter() - t0)
            lines = list(resp.get("output", []))
            if resp.get("status") == "ok":
                return decode_value(resp["value"]), lines
            raise _error_from(resp.get("kind", "HostError"), resp.get("message", ""))
        wid = ",".join(sorted(tried)) or "none"
        if last is not None and not tried:
            raise last
        raise E.WorkerDead(wid)

    def close(self):
        for c in self.conns:
            c.close()
        for s in self.servers:
            s.close()
        self.conns, self.servers = [], []
        self._opened = False

    def __enter__(self):
        return self.open()

    def __exit__(self, *exc):
        self.close()


def dispatch(dm: Demand, cp) -> Value:
    value, _lines = cp.dispatch(dm)
    return value


def make_cp(kind: str, registry: HostRegistry, **kw):
    kind = kind.lower()
    if kind == "null":
        return NullCP(registry)
    if kind == "threaded":
        return ThreadedCP(registry, **kw)
    if kind == "socket":
        return SocketCP(registry, **kw)
    raise ValueError(f"unknown communication procedure {kind!r}")
