"""Output channel for host code.

Host bodies print through :func:`emit`. During a registry call the lines are
captured and handed back to the caller, so output survives any transport and
concurrent programs never interleave partial lines.
"""

from __future__ import annotations

import contextlib
import contextvars
import sys

_capture: contextvars.ContextVar[list | None] = contextvars.ContextVar(
    "gipsy_output", default=None)


def emit(*parts, sep: str = " ") -> None:
    line = sep.join(str(p) for p in parts)
    buf = _capture.get()
    if buf is None:
        sys.stdout.write(line + "\n")
    else:
        buf.append(line)


@contextlib.contextmanager
def captured():
    buf: list[str] = []
    token = _capture.set(buf)
    try:
        yield buf
    finally:
        _capture.reset(token)
