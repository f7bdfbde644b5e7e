"""The host registry: typed native functions and record types."""

from __future__ import annotations

import inspect
from dataclasses import dataclass, field
from typing import Callable

from ..core.errors import (ArityMismatch, BoundaryTypeError,
                           DuplicateRegistration, GipsyError, HostError,
                           UnknownField, UnknownMethod, UnresolvedFunction)
from ..core.values import Dim, Int, Rec, Value
from . import boundary
from .formattag import FormatTag, native_tag
from .output import captured, emit


def immutable(fn):
    """Mark a host function or method as side-effect free (cacheable)."""
    fn.__gipsy_immutable__ = True
    return fn


_PY_TO_HOST = {int: "int", float: "double", bool: "boolean", str: "String",
               type(None): "void", None: "void"}
_PY_NAMES = {"str": "String", "bool": "boolean", "None": "void"}


def host_type_name(annotation) -> str | None:
    """Host type name for a Python annotation; None when absent."""
    if annotation is inspect.Parameter.empty or annotation is inspect.Signature.empty:
        return None
    if isinstance(annotation, str):
        annotation = annotation.strip("'\"")  # postponed forward references
        return _PY_NAMES.get(annotation, annotation)
    if annotation in _PY_TO_HOST:
        return _PY_TO_HOST[annotation]
    if inspect.isclass(annotation):
        return annotation.__name__
    return str(annotation)


@dataclass
class HostFunction:
    name: str
    param_types: tuple  # host type names
    return_type: str
    immutable: bool
    body: Callable
    format_tag: FormatTag = field(default_factory=native_tag)

    @property
    def arity(self) -> int:
        return len(self.param_types)

    def signature(self) -> str:
        return f"({','.join(self.param_types)})->{self.return_type}"

    def manifest_line(self) -> str:
        line = f"{self.name} : ({','.join(self.param_types)}) -> {self.return_type}"
        return line + (" immutable" if self.immutable else "")


def function_from_callable(fn: Callable, name: str | None = None, *,
                           immutable_: bool | None = None,
                           param_types=None, return_type=None,
                           skip_self: bool = False) -> HostFunction:
    sig = inspect.signature(fn)
    params = list(sig.parameters.values())[1 if skip_self else 0:]
    types = list(param_types) if param_types is not None else [
        host_type_name(p.annotation) for p in params]
    if len(types) != len(params):
        raise ArityMismatch(f"{name or fn.__name__}: {len(params)} parameters, "
                            f"{len(types)} types")
    if any(t is None for t in types):
        raise BoundaryTypeError(f"{name or fn.__name__}: parameter types must be annotated")
    ret = return_type or host_type_name(sig.return_annotation)
    if ret is None:
        raise BoundaryTypeError(f"{name or fn.__name__}: return type must be annotated")
    imm = getattr(fn, "__gipsy_immutable__", False) if immutable_ is None else immutable_
    return HostFunction(name or fn.__name__, tuple(types), ret, bool(imm), fn)


class HostRecordType:
    """A record type backed by a Python class with annotated fields."""

    def __init__(self, cls: type, name: str | None = None):
        self.cls = cls
        self.class_name = name or cls.__name__
        ann = {}
        for klass in reversed(cls.__mro__):
            ann.update(getattr(klass, "__annotations__", {}))
        self.fields = tuple((n, host_type_name(t)) for n, t in ann.items()
                            if not n.startswith("_"))
        self.constructor = function_from_callable(
            cls.__init__, self.class_name, skip_self=True, immutable_=True,
            return_type=self.class_name) if cls.__init__ is not object.__init__ else \
            HostFunction(self.class_name, (), self.class_name, True, lambda: None)
        self.methods: dict[str, HostFunction] = {}
        for mname, member in vars(cls).items():
            if mname.startswith("_") or not inspect.isfunction(member):
                continue
            m = function_from_callable(member, f"{self.class_name}.{mname}", skip_self=True)
            self.methods[mname] = m

    # snapshots ------------------------------------------------------------
    def snapshot(self, obj, records) -> Rec:
        vals = []
        for n, t in self.fields:
            if not hasattr(obj, n):
                raise HostError(f"{self.class_name}: field {n} was never set")
            vals.append((n, boundary.from_host(getattr(obj, n), t, records,
                                               f"field {self.class_name}.{n}")))
        return Rec(self.class_name, tuple(vals))

    def instance(self, rec: Rec, records):
        obj = self.cls.__new__(self.cls)
        for n, t in self.fields:
            setattr(obj, n, boundary.to_host(rec.get(n), t, 0, records))
        return obj


class HostRegistry:
    def __init__(self):
        self.functions: dict[str, HostFunction] = {}
        self.records: dict[str, HostRecordType] = {}
        # Bodies that manifests may bind by name without being pre-registered.
        self.library: dict[str, Callable] = {}

    # registration ---------------------------------------------------------
    def _taken(self, name: str) -> bool:
        return name in self.functions or name in self.records

    def register(self, fn: HostFunction) -> None:
        if self._taken(fn.name):
            raise DuplicateRegistration(f"{fn.name} is already registered")
        for t in fn.param_types:
            if t == "void":
                raise BoundaryTypeError(f"{fn.name}: void is not a parameter type")
        self.functions[fn.name] = fn

    def register_callable(self, fn: Callable, name: str | None = None, **kw) -> HostFunction:
        hf = function_from_callable(fn, name, **kw)
        self.register(hf)
        return hf

    def register_record(self, rt: HostRecordType | type) -> HostRecordType:
        if inspect.isclass(rt):
            rt = HostRecordType(rt)
        if self._taken(rt.class_name):
            raise DuplicateRegistration(f"{rt.class_name} is already registered")
        self.records[rt.class_name] = rt
        return rt

    def derive(self) -> "HostRegistry":
        """Child registry sharing the current entries; later additions stay local."""
        r = HostRegistry()
        r.functions = dict(self.functions)
        r.records = dict(self.records)
        r.library = dict(self.library)
        return r

    # lookup ---------------------------------------------------------------
    def lookup(self, name: str) -> HostFunction:
        if name in self.functions:
            return self.functions[name]
        if "." in name:
            owner, _, m = name.partition(".")
            rt = self.records.get(owner)
            if rt is not None and m in rt.methods:
                return rt.methods[m]
        if name in self.records:
            return self.records[name].constructor
        raise UnresolvedFunction(f"no host function named {name!r}")

    def lookup_record(self, name: str) -> HostRecordType | None:
        return self.records.get(name)

    def has(self, name: str) -> bool:
        try:
            self.lookup(name)
            return True
        except UnresolvedFunction:
            return False

    def names(self) -> list[str]:
        return sorted(self.functions)

    # invocation -----------------------------------------------------------
    def _convert_args(self, fn: HostFunction, args, context):
        if len(args) != fn.arity:
            raise ArityMismatch(f"{fn.name} expects {fn.arity} arguments, got {len(args)}")
        out = []
        for i, (v, t) in enumerate(zip(args, fn.param_types)):
            if isinstance(v, Dim) and t == "int":
                if context is None:
                    raise BoundaryTypeError(f"parameter {i}: dimension {v.name} needs a context")
                v = Int(context.query(v.name))
            out.append(boundary.to_host(v, t, i, self.records))
        return out

    def invoke(self, name: str, args, context=None) -> tuple[Value, list[str]]:
        """Call ``name``; return the Lucid result and any emitted output lines.

        Names of the form ``Class.method`` take the receiver as first argument;
        a bare class name runs its constructor.
        """
        with captured() as lines:
            value = self._invoke(name, list(args), context)
        return value, lines

    def _invoke(self, name, args, context):
        if name in self.functions:
            fn = self.functions[name]
            native = self._convert_args(fn, args, context)
            result = self._run(fn, native)
            return boundary.from_host(result, fn.return_type, self.records)
        if name in self.records:
            return self._construct(self.records[name], args, context)
        if "." in name:
            owner, _, m = name.partition(".")
            if owner in self.records:
                if not args:
                    raise ArityMismatch(f"{name} needs a receiver")
                return self._method(self.records[owner], args[0], m, args[1:], context)[0]
        raise UnresolvedFunction(f"no host function named {name!r}")

    @staticmethod
    def _run(fn: HostFunction, native):
        try:
            return fn.body(*native)
        except GipsyError:
            raise
        except Exception as exc:  # host failures surface as HostError
            raise HostError(f"{fn.name}: {type(exc).__name__}: {exc}") from exc

    def _construct(self, rt: HostRecordType, args, context) -> Rec:
        native = self._convert_args(rt.constructor, args, context)
        try:
            obj = rt.cls(*native)
        except GipsyError:
            raise
        except Exception as exc:
            raise HostError(f"{rt.class_name}: {type(exc).__name__}: {exc}") from exc
        return rt.snapshot(obj, self.records)

    def _method(self, rt: HostRecordType, receiver, mname, args, context):
        if not isinstance(receiver, Rec) or receiver.class_name != rt.class_name:
            raise BoundaryTypeError(f"receiver of {rt.class_name}.{mname} is not a {rt.class_name}")
        fn = rt.methods.get(mname)
        if fn is None:
            raise UnknownMethod(f"{rt.class_name} has no method {mname!r}")
        native = self._convert_args(fn, args, context)
        obj = rt.instance(receiver, self.records)
        result = self._run(fn, [obj] + native)
        updated = rt.snapshot(obj, self.records)
        return boundary.from_host(result, fn.return_type, self.records), updated

    def call(self, name: str, args, sink=None, context=None) -> Value:
        value, lines = self.invoke(name, args, context)
        for line in lines:
            (sink or emit)(line)
        return value

    def construct(self, class_name: str, args, sink=None) -> Rec:
        return self.call(class_name, args, sink)

    def field_get(self, obj: Rec, name: str) -> Value:
        try:
            return obj.get(name)
        except KeyError:
            raise UnknownField(f"{obj.class_name} has no field {name!r}") from None

    def method_call(self, obj: Rec, method: str, args, sink=None, context=None):
        rt = self.records.get(obj.class_name)
        if rt is None:
            raise UnresolvedFunction(f"no record type {obj.class_name!r}")
        with captured() as lines:
            result, updated = self._method(rt, obj, method, list(args), context)
        for line in lines:
            (sink or emit)(line)
        return result, updated

    # manifests ------------------------------------------------------------
    def manifest(self) -> str:
        return "".join(self.functions[n].manifest_line() + "\n" for n in self.names())
