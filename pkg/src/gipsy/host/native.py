"""Executable `#NATIVE` segments.

A native segment is Python source. Its top-level functions and classes become
host functions and record types of the program's registry, the way host
segments export their methods without needing a prototype.
"""

from __future__ import annotations

import inspect

from ..core.errors import CompileError, GipsyError, LucidSyntaxError
from .output import emit
from .registry import HostRegistry, immutable

_PROVIDED = {"emit": emit, "immutable": immutable}


def load_native(registry: HostRegistry, source: str, start_line: int = 1,
                filename: str = "<native>") -> list[str]:
    """Run ``source`` and register what it defines; returns the new names."""
    padded = "\n" * (start_line - 1) + source
    try:
        code = compile(padded, filename, "exec")
    except SyntaxError as exc:
        raise LucidSyntaxError(f"native segment: {exc.msg}",
                               (exc.lineno or start_line, exc.offset or 1)) from None
    module = f"gipsy_native_{id(registry):x}"
    ns = {"__name__": module, **_PROVIDED}
    try:
        exec(code, ns)
    except Exception as exc:
        raise CompileError("NativeSegment", f"{type(exc).__name__}: {exc}") from None
    added = []
    for name, obj in ns.items():
        if name.startswith("_") or name in _PROVIDED:
            continue
        try:
            if inspect.isfunction(obj) and obj.__globals__ is ns:
                registry.register_callable(obj, name)
            elif inspect.isclass(obj) and obj.__module__ == module:
                registry.register_record(obj)
            else:
                continue
        except GipsyError as exc:
            raise CompileError("NativeSegment", f"{name}: {exc}") from None
        added.append(name)
    return added
