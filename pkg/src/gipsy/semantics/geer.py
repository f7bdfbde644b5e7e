"""The `.gipsy` format: a JSON document holding a linked program.

Top-level keys, in order: version, asts, dictionary, strefs, cpkind, ics,
natives. Nodes are arrays ``[Class, [line, col] | null, field...]``.
Loading rebuilds the dictionary by re-analyzing the trees against the
registry and rejects the file if the result differs from the stored rows.
"""

from __future__ import annotations

import dataclasses
import json

from ..core import ast as A
from ..core.dictionary import DictEntry, Dictionary
from ..core.errors import FormatError, GipsyError
from ..core.values import decode_type, decode_value, encode_type, encode_value
from ..frontend.segments import Prototype
from ..host.builtins import standard_registry
from ..host.native import load_native
from ..host.registry import HostFunction, HostRegistry
from .analyze import annotate
from .link import StRef, link

VERSION = 1
KEYS = ("version", "asts", "dictionary", "strefs", "cpkind", "ics", "natives")

_NODE_TYPES = {cls.__name__: cls for cls in vars(A).values()
               if isinstance(cls, type) and issubclass(cls, A.Node)
               and dataclasses.is_dataclass(cls) and cls is not A.Node}


def _fields(cls):
    return [f for f in dataclasses.fields(cls) if f.name != "pos"]


def encode_node(n: A.Node):
    out = [type(n).__name__, list(n.pos) if n.pos else None]
    for f in _fields(type(n)):
        v = getattr(n, f.name)
        if isinstance(n, A.Literal):
            out.append(encode_value(v))
        elif isinstance(v, A.Node):
            out.append(encode_node(v))
        elif isinstance(v, tuple):
            out.append([encode_node(x) if isinstance(x, A.Node) else x for x in v])
        else:
            out.append(v)
    return out


def decode_node(data) -> A.Node:
    if not isinstance(data, list) or len(data) < 2 or data[0] not in _NODE_TYPES:
        raise ValueError(f"bad node {str(data)[:60]}")
    cls = _NODE_TYPES[data[0]]
    fields = _fields(cls)
    if len(data) != len(fields) + 2:
        raise ValueError(f"{data[0]} needs {len(fields)} fields")
    pos = tuple(data[1]) if data[1] is not None else None
    kw = {}
    for f, v in zip(fields, data[2:]):
        if cls is A.Literal:
            kw[f.name] = decode_value(v)
        elif isinstance(v, list) and "tuple" in str(f.type):
            kw[f.name] = tuple(decode_node(x) if isinstance(x, list) else x for x in v)
        elif isinstance(v, list):
            kw[f.name] = decode_node(v)
        else:
            kw[f.name] = v
    return cls(**kw, pos=pos)


def _stref_json(s: StRef) -> dict:
    return {"name": s.name, "kind": s.kind, "immutable": s.immutable,
            "returnType": encode_type(s.return_type),
            "paramTypes": [encode_type(t) for t in s.param_types],
            "host": s.host, "embed": s.embed, "binding": s.binding}


def _stref_from(d: dict) -> StRef:
    return StRef(d["name"], d["kind"], bool(d["immutable"]), decode_type(d["returnType"]),
                 tuple(decode_type(t) for t in d["paramTypes"]), d["host"], d["embed"], d["binding"])


def serialize(prog) -> bytes:
    doc = {
        "version": VERSION,
        "asts": [encode_node(a) for a in prog.asts],
        "dictionary": [{"scope": s, "name": n, "kind": k, "detail": det}
                       for s, n, k, det in prog.dictionary.rows()],
        "strefs": [_stref_json(s) for s in prog.strefs],
        "cpkind": prog.cpkind,
        "ics": [{"name": n, "astIndex": i} for n, i in prog.ics],
        "natives": [{"source": src, "startLine": line} for src, line in prog.natives],
    }
    return (json.dumps(doc, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def _split_host(sig: str):
    params, _, ret = sig.partition(")->")
    params = params.lstrip("(")
    return tuple(p for p in params.split(",") if p), ret


def _prototype(s: StRef) -> Prototype:
    def split(t):
        return (t.element, True) if t.kind == "Array" else (t, False)
    rt, rarr = split(s.return_type)
    return Prototype(s.name, s.immutable, rt, rarr, tuple(split(t) for t in s.param_types),
                     None)


def deserialize(data: bytes, registry: HostRegistry | None = None):
    """Rebuild a linked program; host bindings are looked up by name."""
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
        doc = json.loads(text)
    except UnicodeDecodeError as exc:
        raise FormatError(f"offset {exc.start}: invalid UTF-8") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"offset {exc.pos}: {exc.msg}") from None
    if not isinstance(doc, dict) or tuple(doc) != KEYS:
        raise FormatError(f"offset 0: expected keys {', '.join(KEYS)}")
    if doc["version"] != VERSION:
        raise FormatError(f"offset 0: unsupported version {doc['version']!r}")
    try:
        asts = [decode_node(a) for a in doc["asts"]]
        strefs = [_stref_from(s) for s in doc["strefs"]]
        rows = [(r["scope"], r["name"], r["kind"], r["detail"]) for r in doc["dictionary"]]
        ics = [[r["name"], r["astIndex"]] for r in doc["ics"]]
        natives = [(r["source"], r["startLine"]) for r in doc["natives"]]
        cpkind = doc["cpkind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed document: {exc}") from None

    reg = (registry or standard_registry()).derive()
    for src, line in natives:
        load_native(reg, src, line)
    stubs = Dictionary()
    for s in strefs:
        if s.kind in ("function", "embed"):
            _rebind(reg, s)
        if s.kind == "function":
            proto = _prototype(s)
            if s.embed:
                proto = dataclasses.replace(proto, embed=(None, s.embed, s.binding))
            stubs = stubs.extend(s.name, DictEntry("FreeFun", (proto, None)))
        elif s.kind == "constructor":
            stubs = stubs.extend(s.name, DictEntry("Class", (s.name, None)))
    d, annotations = stubs, {}
    try:
        for i, ast in enumerate(asts):
            d, ann = annotate(ast, d, prefix=f"a{i}." if len(asts) > 1 else "")
            annotations.update(ann)
    except GipsyError as exc:
        raise FormatError(f"stored tree does not analyze: {exc.kind}: {exc}") from None
    prog = link(None, asts, reg, d, None, cpkind, rebind=True)
    if prog.dictionary.rows() != rows:
        raise FormatError("dictionary does not match the stored program")
    if prog.strefs != strefs:
        raise FormatError("sequential thread references do not match the stored program")
    prog.ics = ics
    prog.natives = natives
    prog.annotations = annotations
    return prog


def _rebind(reg: HostRegistry, s: StRef) -> None:
    """Make an embed-bound library function available again after loading."""
    name = s.target
    if s.embed is None or name in reg.functions or name not in reg.library:
        return
    params, ret = _split_host(s.host)
    reg.register(HostFunction(name, params, ret, s.immutable, reg.library[name]))
