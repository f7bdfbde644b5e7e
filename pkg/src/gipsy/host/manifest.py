"""Registry manifests and embed() resolution."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from urllib.parse import unquote, urlparse

from ..core.errors import (BoundaryTypeError, CompileError, SignatureMismatch,
                           UnresolvedFunction)
from . import boundary
from .registry import HostFunction, HostRegistry

_LINE = re.compile(
    r"^\s*(?P<name>[A-Za-z_][\w.]*)\s*:\s*\((?P<params>[^)]*)\)\s*->\s*"
    r"(?P<ret>[A-Za-z_]\w*(?:\[\])?)\s*(?P<imm>immutable)?\s*$")


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    param_types: tuple
    return_type: str
    immutable: bool

    def line(self) -> str:
        s = f"{self.name} : ({','.join(self.param_types)}) -> {self.return_type}"
        return s + (" immutable" if self.immutable else "")


def parse_manifest(text: str, source: str = "<manifest>") -> dict[str, ManifestEntry]:
    out: dict[str, ManifestEntry] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise CompileError("InvalidManifest", f"{source}:{lineno}: cannot parse {raw!r}")
        params = tuple(p.strip() for p in m["params"].split(",") if p.strip())
        out[m["name"]] = ManifestEntry(m["name"], params, m["ret"], bool(m["imm"]))
    return out


def read_manifest(path: str) -> dict[str, ManifestEntry]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CompileError("InvalidURI", f"cannot read {path}: {exc.strerror}") from None
    return parse_manifest(text, path)


def bind_entry(registry: HostRegistry, e: ManifestEntry) -> HostFunction:
    """Bind a manifest entry to a registered function or a library body."""
    if e.name in registry.functions:
        fn = registry.functions[e.name]
        if (fn.param_types, fn.return_type) != (e.param_types, e.return_type):
            raise SignatureMismatch(e.name, e.line(), fn.manifest_line())
        return fn
    body = registry.library.get(e.name)
    if body is None:
        raise UnresolvedFunction(f"no built-in body named {e.name!r}")
    for t in e.param_types + (e.return_type,):
        if not boundary.is_known(t, registry.records):
            raise BoundaryTypeError(f"{e.name}: unknown host type {t!r}")
    fn = HostFunction(e.name, e.param_types, e.return_type, e.immutable, body)
    registry.register(fn)
    return fn


def load_manifest(registry: HostRegistry, path: str) -> list[HostFunction]:
    """``--registry=path``: bind every entry of a manifest file."""
    return [bind_entry(registry, e) for e in read_manifest(path).values()]


def uri_path(uri: str, base_dir: str | None = None) -> str:
    parsed = urlparse(uri)
    if parsed.scheme != "file":
        scheme = parsed.scheme or "none"
        raise CompileError("InvalidURI", f"scheme {scheme!r} unsupported (file:// only)")
    path = unquote(parsed.netloc + parsed.path)
    if not os.path.isabs(path) and base_dir:
        path = os.path.join(base_dir, path)
    return path


def resolve_embed(registry: HostRegistry, uri: str, method: str, declared=None,
                  base_dir: str | None = None) -> HostFunction:
    entries = read_manifest(uri_path(uri, base_dir))
    if method not in entries:
        raise CompileError("InvalidURI", f"{uri} does not export {method!r}")
    fn = bind_entry(registry, entries[method])
    if declared is not None:
        check_signature(declared, fn, registry)
    return fn


def check_signature(proto, fn: HostFunction, registry: HostRegistry) -> None:
    """Prototype vs host signature, per the boundary table."""
    records = registry.records
    declared = proto.signature()
    if proto.arity != fn.arity:
        raise SignatureMismatch(proto.name, declared, fn.signature(), proto.pos)
    for t, h in zip(proto.full_param_types(), fn.param_types):
        if not boundary.is_known(h, records) or not boundary.accepts_param(h, t, records):
            raise SignatureMismatch(proto.name, declared, fn.signature(), proto.pos)
    h = fn.return_type
    if not boundary.is_known(h, records) or not boundary.accepts_return(
            h, proto.full_return_type, records):
        raise SignatureMismatch(proto.name, declared, fn.signature(), proto.pos)
