"""Linking: bind imperative stubs to the host registry."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import ast as A
from ..core.dictionary import DictEntry, Dictionary
from ..core.errors import UnresolvedFunction, UnresolvedType
from ..core.types import GipsyType
from ..frontend.segments import Prototype
from ..host import boundary
from ..host.manifest import check_signature, resolve_embed
from ..host.registry import HostFunction, HostRegistry

CP_KINDS = ("Null", "Socket")


@dataclass(frozen=True)
class StRef:
    """A sequential-thread reference: one host entry point the program uses."""
    name: str
    kind: str  # function | embed | constructor | method
    immutable: bool
    return_type: GipsyType
    param_types: tuple
    host: str  # host signature, e.g. "(int,int)->int"
    embed: str | None = None
    binding: str | None = None  # registry name when it differs from ``name``

    @property
    def target(self) -> str:
        return self.binding or self.name


@dataclass
class EductionProgram:
    asts: list
    dictionary: Dictionary
    strefs: list
    cpkind: str = "Null"
    ics: list = field(default_factory=list)
    natives: list = field(default_factory=list)  # [(source, start_line)]
    registry: HostRegistry | None = field(default=None, compare=False, repr=False)
    annotations: dict = field(default_factory=dict, compare=False, repr=False)
    warnings: list = field(default_factory=list, compare=False)

    def stref(self, name: str) -> StRef | None:
        for s in self.strefs:
            if s.name == name:
                return s
        return None

    def __eq__(self, other):
        if not isinstance(other, EductionProgram):
            return NotImplemented
        return (self.asts == other.asts and self.dictionary.rows() == other.dictionary.rows()
                and self.strefs == other.strefs and self.cpkind == other.cpkind
                and self.ics == other.ics and self.natives == other.natives)


def prototype_from_host(fn: HostFunction, records) -> Prototype:
    """A prototype equivalent to a host function's own signature."""
    def split(t: GipsyType):
        if t.kind == "Array":
            return t.element, True
        return t, False

    rt, rarr = split(boundary.lucid_return_type(fn.return_type, records))
    params = tuple(split(boundary.lucid_param_type(h, records)) for h in fn.param_types)
    return Prototype(fn.name, fn.immutable, rt, rarr, params)


def _stref(kind: str, fn: HostFunction, immutable: bool, records, embed=None) -> StRef:
    proto = prototype_from_host(fn, records)
    return StRef(fn.name, kind, immutable, proto.full_return_type,
                 proto.full_param_types(), fn.signature(), embed)


def _lookup(registry: HostRegistry, name: str, pos=None) -> HostFunction:
    try:
        return registry.lookup(name)
    except UnresolvedFunction:
        raise UnresolvedFunction(f"no host binding for {name!r}", pos) from None


def _embed_refs(asts) -> list:
    return [n for ast in asts for n in A.walk(ast) if isinstance(n, A.EmbedRef)]


def link(prog, asts: list, registry: HostRegistry, dictionary: Dictionary,
         base_dir: str | None = None, cpkind: str = "Null",
         rebind: bool = False) -> EductionProgram:
    """Resolve every FreeFun/Class entry of ``dictionary`` against ``registry``.

    With ``rebind`` (loading a saved program) embed bindings are looked up by
    name instead of re-reading their manifests.
    """
    if cpkind not in CP_KINDS:
        raise ValueError(f"unknown communication procedure {cpkind!r}")
    records = registry.records
    strefs: dict[str, StRef] = {}
    d = dictionary
    glob = d.global_entries()
    for name in sorted(glob):
        entry = glob[name]
        if entry.kind == "FreeFun":
            proto, _ = entry.data
            embed = None
            if proto.embed is not None:
                _, uri, remote = proto.embed
                embed = uri
                if rebind:
                    fn = _lookup(registry, remote or name, proto.pos)
                else:
                    fn = resolve_embed(registry, uri, remote or name, None, base_dir)
            else:
                fn = _lookup(registry, name, proto.pos)
            check_signature(proto, fn, registry)
            strefs[name] = StRef(name, "function", proto.immutable, proto.full_return_type,
                                 proto.full_param_types(), fn.signature(), embed,
                                 fn.name if fn.name != name else None)
            d = _set_global(d, name, DictEntry("FreeFun", (proto, fn.name)))
        elif entry.kind == "Class":
            rt = registry.lookup_record(name)
            if rt is None:
                raise UnresolvedType(f"no record type {name!r} in the registry")
            d = _set_global(d, name, DictEntry("Class", (name, rt.class_name)))
            strefs[name] = _stref("constructor", rt.constructor, True, records)
            for fname, htype in rt.fields:
                d = _set_global(d, f"{name}.{fname}", DictEntry("ClassVar", (name, fname, htype)))
            for mname in sorted(rt.methods):
                m = rt.methods[mname]
                d = _set_global(d, m.name, DictEntry("ClassFun", (name, mname, m.signature())))
                strefs[m.name] = _stref("method", m, m.immutable, records)
    for ref in _embed_refs(asts):
        if rebind:
            fn = _lookup(registry, ref.method, ref.pos)
        else:
            fn = resolve_embed(registry, ref.uri, ref.method, None, base_dir)
        if fn.arity != len(ref.args):
            raise UnresolvedFunction(
                f"{ref.method} takes {fn.arity} arguments, embed passes {len(ref.args)}", ref.pos)
        if ref.method not in strefs:
            strefs[ref.method] = _stref("embed", fn, fn.immutable, records, ref.uri)
    ics = sorted({(n.name, i) for i, ast in enumerate(asts) for n in A.walk(ast)
                  if isinstance(n, A.VarDecl)}, key=lambda x: (x[1], x[0]))
    return EductionProgram(list(asts), d, [strefs[k] for k in sorted(strefs)], cpkind,
                           [list(x) for x in ics], registry=registry)


def _set_global(d: Dictionary, name: str, entry: DictEntry) -> Dictionary:
    return Dictionary(d.enter("global").extend(name, entry).scopes, d.current)
