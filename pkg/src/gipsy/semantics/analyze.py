"""Scope analysis: build the full dictionary and resolve every identifier."""

from __future__ import annotations

from ..core import ast as A
from ..core.dictionary import DictEntry, Dictionary
from ..core.errors import (ArityMismatch, DuplicateDefinition, NotADimension,
                           NotCallable, UndefinedIdentifier, Unsupported)

_DIM_KINDS = ("Dim", "Formal")


class _Analyzer:
    def __init__(self, d: Dictionary, prefix: str):
        self.d = d
        self.prefix = prefix
        self.counter = 0
        self.annotations: dict[int, str] = {}
        self.nodes: list = []  # keeps annotated nodes alive

    def new_scope(self, kind: str) -> str:
        sid = f"{self.prefix}{kind}{self.counter}"
        self.counter += 1
        return sid

    def resolve(self, node: A.Id):
        found = self.d.resolve(node.name)
        if found is None:
            raise UndefinedIdentifier(f"undefined identifier {node.name!r}", node.pos)
        self.annotations[id(node)] = found[0]
        self.nodes.append(node)
        return found[1]

    def dimension(self, e: A.Expr | None, pos):
        if e is None:
            raise Unsupported("operator has no dimension (translate first)", pos)
        if isinstance(e, A.Id):
            if self.d.resolve(e.name) is None:
                raise NotADimension(f"{e.name!r} is not a declared dimension", e.pos)
            entry = self.resolve(e)
            if entry.kind not in _DIM_KINDS:
                raise NotADimension(f"{e.name!r} is not a dimension", e.pos)
        else:
            self.expr(e)

    # expressions ------------------------------------------------------------
    def expr(self, e: A.Expr) -> None:
        method = getattr(self, "e_" + type(e).__name__)
        method(e)

    def e_Literal(self, e):
        pass

    def e_Id(self, e):
        entry = self.resolve(e)
        if entry.kind == "Func":
            formals, _ = entry.data
            raise ArityMismatch(f"function {e.name!r} expects {len(formals)} arguments, got none",
                                e.pos)

    def e_HashQuery(self, e):
        self.dimension(e.dim, e.pos)

    def e_At(self, e):
        self.dimension(e.dim, e.pos)
        self.expr(e.tag)
        self.expr(e.body)

    def e_If(self, e):
        self.expr(e.cond)
        self.expr(e.then)
        self.expr(e.else_)

    def e_Call(self, e):
        for dim in e.dims:
            self.dimension(dim, e.pos)
        if not isinstance(e.callee, A.Id):
            raise NotCallable("only named functions can be called", e.pos)
        entry = self.resolve(e.callee)
        n = len(e.args)
        if entry.kind == "Func":
            formals, _ = entry.data
            if len(formals) != n:
                raise ArityMismatch(f"{e.callee.name} expects {len(formals)} arguments, got {n}",
                                    e.pos)
        elif entry.kind == "FreeFun":
            proto, _ = entry.data
            if proto.arity != n:
                raise ArityMismatch(f"{e.callee.name} expects {proto.arity} arguments, got {n}",
                                    e.pos)
        elif entry.kind != "Class":
            raise NotCallable(f"{e.callee.name!r} is not a function", e.pos)
        for a in e.args:
            self.expr(a)

    def e_Where(self, e):
        saved = self.d
        self.d = self.d.push(self.new_scope("w"))
        self.annotations[id(e)] = self.d.current
        self.nodes.append(e)
        seen = set()
        for decl in e.decls:
            for name, entry in self.entries(decl):
                if name in seen:
                    raise DuplicateDefinition(f"{name!r} defined twice in one where clause",
                                              decl.pos)
                seen.add(name)
                self.d = self.d.extend(name, entry)
        for decl in e.decls:
            self.decl(decl)
        self.expr(e.body)
        self.d = Dictionary(self.d.scopes, saved.current)

    def entries(self, decl):
        if isinstance(decl, A.DimensionDecl):
            return [(n, DictEntry("Dim")) for n in decl.names]
        if isinstance(decl, A.VarDecl):
            return [(decl.name, DictEntry("Var", decl.expr))]
        if isinstance(decl, A.FuncDecl):
            if decl.dims:
                raise Unsupported("dimension-subscripted function definitions", decl.pos)
            return [(decl.name, DictEntry("Func", (decl.formals, decl.body)))]
        raise Unsupported(f"{type(decl).__name__} is not supported in evaluated programs",
                          decl.pos)

    def decl(self, decl):
        if isinstance(decl, A.VarDecl):
            self.expr(decl.expr)
        elif isinstance(decl, A.FuncDecl):
            if len(set(decl.formals)) != len(decl.formals):
                raise DuplicateDefinition(f"repeated formal in {decl.name}", decl.pos)
            saved = self.d.current
            self.d = self.d.push(self.new_scope("f"))
            self.annotations[id(decl)] = self.d.current
            self.nodes.append(decl)
            for i, f in enumerate(decl.formals):
                self.d = self.d.extend(f, DictEntry("Formal", i))
            self.expr(decl.body)
            self.d = Dictionary(self.d.scopes, saved)

    def e_ArrayLit(self, e):
        for x in e.elements:
            self.expr(x)

    def e_Index(self, e):
        self.expr(e.array)
        for x in e.indices:
            self.expr(x)

    def e_DotField(self, e):
        self.expr(e.obj)

    def e_DotCall(self, e):
        for dim in e.dims:
            self.dimension(dim, e.pos)
        self.expr(e.obj)
        for a in e.args:
            self.expr(a)

    def e_EmbedRef(self, e):
        for a in e.args:
            self.expr(a)

    def e_UnOp(self, e):
        if e.op in A.DIALECT_UNARY:
            raise Unsupported(f"untranslated operator {e.op!r}", e.pos)
        self.expr(e.operand)

    def e_BinOp(self, e):
        if e.op in A.DIALECT_BINARY:
            raise Unsupported(f"untranslated operator {e.op!r}", e.pos)
        self.expr(e.lhs)
        self.expr(e.rhs)


def annotate(ast: A.Expr, stubs: Dictionary, prefix: str = "") -> tuple[Dictionary, dict]:
    """Analyze ``ast``; return the extended dictionary and node -> scope annotations."""
    an = _Analyzer(stubs, prefix)
    an.expr(ast)
    return Dictionary(an.d.scopes, stubs.current), an.annotations


def analyze(ast: A.Expr, stubs: Dictionary, prefix: str = "") -> Dictionary:
    return annotate(ast, stubs, prefix)[0]


def variable_names(ast: A.Expr) -> list[str]:
    return sorted({n.name for n in A.walk(ast) if isinstance(n, A.VarDecl)})


def called_names(ast: A.Expr) -> set:
    """Names used as callees, plus identifiers never defined in the program."""
    defined, used = set(), set()
    for n in A.walk(ast):
        if isinstance(n, (A.VarDecl, A.FuncDecl)):
            defined.add(n.name)
        if isinstance(n, A.FuncDecl):
            defined.update(n.formals)
        if isinstance(n, A.DimensionDecl):
            defined.update(n.names)
        if isinstance(n, A.Call) and isinstance(n.callee, A.Id):
            used.add(n.callee.name)
        elif isinstance(n, A.Id):
            used.add(n.name)
    return used - defined
