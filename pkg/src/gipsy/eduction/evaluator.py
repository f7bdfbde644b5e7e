"""Demand-driven evaluation of linked programs.

Definitions live in frames. A where clause gets one frame per enclosing
frame; a function call gets one frame per (caller frame, call site), whose
formals are bound by name to the actual expressions in the caller. Variable
demands are memoized in the warehouse under (frame, name, context).
"""

from __future__ import annotations

import hashlib
import itertools
import math
import operator

from ..core import ast as A
from ..core.context import EMPTY, Context
from ..core.errors import (ArityMismatch, DepthExceeded, DivisionByZero, GipsyError,
                           LucidIndexError, LucidTypeError, NotADimension,
                           NotCallable, UndefinedIdentifier, UnknownField)
from ..core.values import (FALSE, TRUE, Arr, Bool, Dim, Double, Float, HostFnRef,
                           Int, Rec, Str, Value)
from .cp import Demand, NullCP
from .warehouse import MISS, Warehouse

DEFAULT_DEPTH = 100_000


class Frame:
    __slots__ = ("uid", "parent", "bindings", "children", "resolved")

    def __init__(self, uid, parent, bindings):
        self.uid = uid
        self.parent = parent
        self.bindings = bindings
        self.children = {}
        self.resolved = {}

    def lookup(self, name):
        hit = self.resolved.get(name)
        if hit is not None:
            return hit
        f = self
        while f is not None:
            b = f.bindings.get(name)
            if b is not None:
                hit = (b, f)
                self.resolved[name] = hit
                return hit
            f = f.parent
        raise UndefinedIdentifier(f"undefined identifier {name!r}")


class HostInfo:
    __slots__ = ("target", "immutable", "params")

    def __init__(self, target, immutable, params):
        self.target = target
        self.immutable = immutable
        self.params = params


def _host_params(sig: str) -> tuple:
    inner = sig[1:sig.index(")")]
    return tuple(p for p in inner.split(",") if p)


def impure_names(asts, is_pure_call) -> set:
    """Names whose value may depend on a mutable host call (static, by name)."""
    deps: dict[str, set] = {}
    direct: set = set()
    funcs: dict[str, list] = {}
    for ast in asts:
        for n in A.walk(ast):
            if isinstance(n, A.FuncDecl):
                funcs.setdefault(n.name, []).append(n.formals)

    def scan(owner: str, expr):
        ds = deps.setdefault(owner, set())
        for n in A.walk(expr):
            if isinstance(n, A.Id):
                ds.add(n.name)
            if not is_pure_call(n):
                direct.add(owner)
            if isinstance(n, A.Call) and isinstance(n.callee, A.Id):
                for formals in funcs.get(n.callee.name, ()):
                    for formal, arg in zip(formals, n.args):
                        scan(formal, arg)

    for ast in asts:
        scan("", ast)
        for n in A.walk(ast):
            if isinstance(n, A.VarDecl):
                scan(n.name, n.expr)
            elif isinstance(n, A.FuncDecl):
                scan(n.name, n.body)
    impure = set(direct)
    changed = True
    while changed:
        changed = False
        for name, ds in deps.items():
            if name not in impure and ds & impure:
                impure.add(name)
                changed = True
    impure.discard("")
    return impure


def _truncdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


_NUMERIC = (Int, Float, Double)
_REL = {"<": operator.lt, ">": operator.gt, "<=": operator.le, ">=": operator.ge}


def _promote(a: Value, b: Value):
    ta, tb = type(a), type(b)
    if ta is tb:
        return ta
    kinds = {ta, tb}
    if Double in kinds:
        return Double
    return Float


def apply_binop(op: str, a: Value, b: Value) -> Value:
    if op in ("==", "="):
        return Bool(_equal(a, b))
    if op == "!=":
        return Bool(not _equal(a, b))
    if op in ("&&", "||"):
        if not (isinstance(a, Bool) and isinstance(b, Bool)):
            raise LucidTypeError(f"{op} needs Bool operands, got {_kinds(a, b)}")
        return Bool(a.value and b.value) if op == "&&" else Bool(a.value or b.value)
    if op in ("&", "|"):
        if isinstance(a, Bool) and isinstance(b, Bool):
            return Bool(a.value and b.value) if op == "&" else Bool(a.value or b.value)
        if isinstance(a, Int) and isinstance(b, Int):
            return Int(a.value & b.value if op == "&" else a.value | b.value)
        raise LucidTypeError(f"{op} needs Bool or Int operands, got {_kinds(a, b)}")
    if op in _REL:
        if isinstance(a, _NUMERIC) and isinstance(b, _NUMERIC):
            return Bool(_REL[op](a.value, b.value))
        if isinstance(a, Str) and isinstance(b, Str):
            return Bool(_REL[op](a.value, b.value))
        raise LucidTypeError(f"{op} needs numeric or String operands, got {_kinds(a, b)}")
    if op == "+" and isinstance(a, Str) and isinstance(b, Str):
        return Str(a.value + b.value)
    if not (isinstance(a, _NUMERIC) and isinstance(b, _NUMERIC)):
        raise LucidTypeError(f"{op} needs numeric operands, got {_kinds(a, b)}")
    kind = _promote(a, b)
    x, y = a.value, b.value
    if kind is Int:
        if op == "+":
            return Int(x + y)
        if op == "-":
            return Int(x - y)
        if op == "*":
            return Int(x * y)
        if y == 0:
            raise DivisionByZero(f"{x} {op} 0")
        q = _truncdiv(x, y)
        return Int(q) if op == "/" else Int(x - y * q)
    if op in ("/", "%") and y == 0:
        raise DivisionByZero(f"{x} {op} 0")
    if op == "+":
        r = x + y
    elif op == "-":
        r = x - y
    elif op == "*":
        r = x * y
    elif op == "/":
        r = x / y
    elif op == "%":
        r = math.fmod(x, y)
    else:
        raise LucidTypeError(f"unknown operator {op!r}")
    return kind(r)


def _equal(a: Value, b: Value) -> bool:
    if isinstance(a, _NUMERIC) and isinstance(b, _NUMERIC):
        return a.value == b.value
    return a == b


def _kinds(a, b) -> str:
    return f"{a.type}, {b.type}"


def apply_unop(op: str, a: Value) -> Value:
    if op == "-":
        if isinstance(a, _NUMERIC):
            return type(a)(-a.value)
        raise LucidTypeError(f"unary - needs a number, got {a.type}")
    if op == "!":
        if isinstance(a, Bool):
            return FALSE if a.value else TRUE
        raise LucidTypeError(f"! needs a Bool, got {a.type}")
    raise LucidTypeError(f"unknown operator {op!r}")


def fingerprint(prog) -> str:
    """Content hash of a program; keeps warehouse keys of different programs apart."""
    fp = getattr(prog, "_fingerprint", None)
    if fp is None:
        h = hashlib.sha1()
        for a in prog.asts:
            h.update(repr(a).encode())
        for src, line in prog.natives:
            h.update(f"{line}:{src}".encode())
        fp = prog._fingerprint = h.hexdigest()[:16]
    return fp


class Evaluator:
    """Evaluates the trees of one linked program.

    Shares its warehouse and communication procedure with the caller; every
    call to :meth:`ev` counts as one rule application.
    """

    def __init__(self, prog, cp=None, warehouse: Warehouse | None = None,
                 depth_limit: int = DEFAULT_DEPTH, sink=None, tag: int = 0):
        self.prog = prog
        self.fp = fingerprint(prog)
        self.tag = tag
        self._uids = itertools.count()
        self.registry = prog.registry
        self.cp = cp or NullCP(self.registry)
        self.wh = warehouse if warehouse is not None else Warehouse()
        self.limit = depth_limit
        self.sink = sink
        self.depth = 0
        self.rule_applications = 0
        self.host_calls = 0
        self.output: list[str] = []
        self.hosts: dict[str, HostInfo] = {}
        for s in prog.strefs:
            self.hosts[s.name] = HostInfo(s.target, s.immutable, _host_params(s.host))
        self.global_frame = self._global_frame()
        self.impure = impure_names(prog.asts, self._pure_call)
        self._where_cache: dict[int, tuple] = {}
        self._dispatch = {
            A.Literal: self.ev_literal, A.Id: self.ev_id, A.If: self.ev_if,
            A.HashQuery: self.ev_hash, A.At: self.ev_at, A.Where: self.ev_where,
            A.Call: self.ev_call, A.ArrayLit: self.ev_array, A.Index: self.ev_index,
            A.DotField: self.ev_field, A.DotCall: self.ev_method, A.EmbedRef: self.ev_embed,
            A.UnOp: self.ev_unop, A.BinOp: self.ev_binop,
        }

    # setup ------------------------------------------------------------------
    def _global_frame(self) -> Frame:
        b = {}
        for name, e in self.prog.dictionary.global_entries().items():
            if e.kind == "FreeFun":
                b[name] = ("host", name)
            elif e.kind == "Class":
                b[name] = ("class", name)
        return self.frame(None, b)

    def frame(self, parent, bindings) -> Frame:
        # uids are deterministic per evaluation, so warehouse keys are too
        return Frame((self.fp, self.tag, next(self._uids)), parent, bindings)

    def host_info(self, name: str) -> HostInfo:
        info = self.hosts.get(name)
        if info is None:
            fn = self.registry.lookup(name)
            info = HostInfo(fn.name, fn.immutable, fn.param_types)
            self.hosts[name] = info
        return info

    def _pure_call(self, n) -> bool:
        try:
            if isinstance(n, A.Call) and isinstance(n.callee, A.Id):
                info = self.hosts.get(n.callee.name)
                return info is None or info.immutable
            if isinstance(n, A.EmbedRef):
                return self.host_info(n.method).immutable
            if isinstance(n, A.DotCall):
                owners = [rt for rt in self.registry.records.values() if n.name in rt.methods]
                return bool(owners) and all(rt.methods[n.name].immutable for rt in owners)
        except GipsyError:
            return False
        return True

    # entry points -----------------------------------------------------------
    def evaluate(self, ast: A.Expr, ctx: Context = EMPTY) -> Value:
        return self.ev(ast, self.global_frame, ctx)

    def emit(self, lines) -> None:
        for line in lines:
            self.output.append(line)
            if self.sink is not None:
                self.sink(line)

    def ev(self, e: A.Expr, f: Frame, ctx: Context) -> Value:
        self.rule_applications += 1
        self.depth += 1
        try:
            if self.depth > self.limit:
                raise DepthExceeded(f"evaluation depth exceeded {self.limit}")
            return self._dispatch[type(e)](e, f, ctx)
        except GipsyError as exc:
            if exc.pos is None:
                exc.pos = e.pos
            raise
        finally:
            self.depth -= 1

    # rules ------------------------------------------------------------------
    def ev_literal(self, e, f, ctx):
        return e.value

    def ev_id(self, e, f, ctx):
        b, owner = f.lookup(e.name)
        kind = b[0]
        if kind == "var":
            return self.demand(e.name, owner, b[1], ctx)
        if kind == "formal":
            return self.ev(b[1], b[2], ctx)
        if kind == "dim":
            return Dim(e.name)
        if kind == "host":
            return HostFnRef(e.name)
        if kind == "func":
            raise ArityMismatch(f"function {e.name!r} used without arguments")
        raise NotCallable(f"{e.name!r} cannot be used as a value")

    def demand(self, name: str, owner: Frame, expr, ctx: Context) -> Value:
        """Intensional demand for variable ``name`` at ``ctx``."""
        if name in self.impure:
            return self.ev(expr, owner, ctx)
        key = (owner.uid, name, ctx.key)
        v = self.wh.get(key)
        if v is not MISS:
            return v
        v = self.ev(expr, owner, ctx)
        self.wh.put(key, v)
        return v

    def dim_name(self, d, f, ctx) -> str:
        if isinstance(d, A.Id):
            b, _ = f.lookup(d.name)
            if b[0] == "dim":
                return d.name
            v = self.ev(d, f, ctx)
            if isinstance(v, Dim):
                return v.name
            raise NotADimension(f"{d.name!r} is not a dimension", d.pos)
        v = self.ev(d, f, ctx)
        if not isinstance(v, Dim):
            raise NotADimension(f"dimension expression yields {v.type}", d.pos)
        return v.name

    def ev_hash(self, e, f, ctx):
        return Int(ctx.query(self.dim_name(e.dim, f, ctx)))

    def ev_at(self, e, f, ctx):
        dim = self.dim_name(e.dim, f, ctx)
        tag = self.ev(e.tag, f, ctx)
        if not isinstance(tag, Int):
            raise LucidTypeError(f"context tag must be Int, got {tag.type}")
        return self.ev(e.body, f, ctx.override(dim, tag.value))

    def ev_if(self, e, f, ctx):
        c = self.ev(e.cond, f, ctx)
        if not isinstance(c, Bool):
            raise LucidTypeError(f"if condition must be Bool, got {c.type}")
        return self.ev(e.then if c.value else e.else_, f, ctx)

    def _where_parts(self, e: A.Where):
        parts = self._where_cache.get(id(e))
        if parts is None:
            dims, template = [], {}
            for d in e.decls:
                if isinstance(d, A.DimensionDecl):
                    dims.extend(d.names)
                    for n in d.names:
                        template[n] = ("dim",)
                elif isinstance(d, A.VarDecl):
                    template[d.name] = ("var", d.expr)
                elif isinstance(d, A.FuncDecl):
                    template[d.name] = ("func", d)
            parts = (tuple(dims), template)
            self._where_cache[id(e)] = parts
        return parts

    def ev_where(self, e, f, ctx):
        dims, template = self._where_parts(e)
        child = f.children.get(id(e))
        if child is None:
            child = f.children.setdefault(id(e), self.frame(f, template))
        for d in dims:
            ctx = ctx.override(d, 0)
        return self.ev(e.body, child, ctx)

    def ev_call(self, e, f, ctx):
        callee = e.callee
        if not isinstance(callee, A.Id):
            raise NotCallable("only named functions can be called")
        b, owner = f.lookup(callee.name)
        kind = b[0]
        if kind == "func":
            decl = b[1]
            if len(decl.formals) != len(e.args):
                raise ArityMismatch(
                    f"{decl.name} expects {len(decl.formals)} arguments, got {len(e.args)}")
            child = f.children.get(id(e))
            if child is None:
                bindings = {p: ("formal", a, f) for p, a in zip(decl.formals, e.args)}
                child = f.children.setdefault(id(e), self.frame(owner, bindings))
            return self.ev(decl.body, child, ctx)
        if kind in ("host", "class"):
            args = [self.ev(a, f, ctx) for a in e.args]
            return self.call_host(callee.name, args, ctx)
        raise NotCallable(f"{callee.name!r} is not a function")

    def call_host(self, name: str, args, ctx: Context) -> Value:
        """Functional demand; cached only when the entry point is immutable."""
        info = self.host_info(name)
        args = tuple(Int(ctx.query(a.name)) if isinstance(a, Dim) and p == "int" else a
                     for a, p in zip(args, info.params)) + tuple(args[len(info.params):])
        key = None
        if info.immutable:
            key = ("fn", self.fp, info.target, args)
            v = self.wh.get(key)
            if v is not MISS:
                return v
        v, lines = self.cp.dispatch(Demand("Functional", info.target, args, ctx))
        self.host_calls += 1
        self.emit(lines)
        if key is not None:
            self.wh.put(key, v)
        return v

    def ev_method(self, e, f, ctx):
        obj = self.ev(e.obj, f, ctx)
        if not isinstance(obj, Rec):
            raise LucidTypeError(f"method {e.name!r} called on {obj.type}")
        args = [self.ev(a, f, ctx) for a in e.args]
        return self.call_host(f"{obj.class_name}.{e.name}", [obj] + args, ctx)

    def ev_field(self, e, f, ctx):
        obj = self.ev(e.obj, f, ctx)
        if not isinstance(obj, Rec):
            raise LucidTypeError(f"field {e.name!r} read from {obj.type}")
        try:
            return obj.get(e.name)
        except KeyError:
            raise UnknownField(f"{obj.class_name} has no field {e.name!r}") from None

    def ev_embed(self, e, f, ctx):
        args = [self.ev(a, f, ctx) for a in e.args]
        return self.call_host(e.method, args, ctx)

    def ev_array(self, e, f, ctx):
        items = [self.ev(x, f, ctx) for x in e.elements]
        return Arr(items[0].type, tuple(items))

    def ev_index(self, e, f, ctx):
        v = self.ev(e.array, f, ctx)
        for ix in e.indices:
            i = self.ev(ix, f, ctx)
            if not isinstance(v, Arr):
                raise LucidTypeError(f"cannot index {v.type}")
            if not isinstance(i, Int):
                raise LucidTypeError(f"array index must be Int, got {i.type}")
            if not 0 <= i.value < len(v.items):
                raise LucidIndexError(f"index {i.value} out of range 0..{len(v.items) - 1}")
            v = v.items[i.value]
        return v

    def ev_unop(self, e, f, ctx):
        return apply_unop(e.op, self.ev(e.operand, f, ctx))

    def ev_binop(self, e, f, ctx):
        a = self.ev(e.lhs, f, ctx)
        b = self.ev(e.rhs, f, ctx)
        return apply_binop(e.op, a, b)
