"""Canonical pretty-printer; its output reparses to an equal tree."""

from __future__ import annotations

import json

from ..core import ast as A
from ..core.values import Bool, Double, Float, Int, Str, render, shortest_f32

_ATOMIC = (A.Id, A.Literal, A.Call, A.Index, A.DotField, A.DotCall, A.ArrayLit,
           A.EmbedRef)
_SELF_PARENS = (A.BinOp, A.UnOp, A.At, A.Where)


def pretty(node: A.Node, indent: int = 0) -> str:
    if isinstance(node, A.Decl):
        return _decl(node, indent)
    return _expr(node, indent)


def _literal(v) -> str:
    if isinstance(v, Int):
        return str(v.value)
    if isinstance(v, Double):
        return repr(v.value)
    if isinstance(v, Float):
        return shortest_f32(v.value) + "f"
    if isinstance(v, Bool):
        return "true" if v.value else "false"
    if isinstance(v, Str):
        return json.dumps(v.value, ensure_ascii=False)
    return render(v)


def _atom(e: A.Expr, ind: int) -> str:
    text = _expr(e, ind)
    if isinstance(e, _ATOMIC) and not _negative_literal(e):
        return text
    if isinstance(e, _SELF_PARENS):
        return text
    return f"({text})"


def _negative_literal(e) -> bool:
    return (isinstance(e, A.Literal) and isinstance(e.value, (Int, Double, Float))
            and str(e.value.value).startswith("-"))


def _dim_suffix(dim) -> str:
    if dim is None:
        return ""
    if isinstance(dim, A.Id):
        return "." + dim.name
    return ".(" + _expr(dim, 0) + ")"


def _args(args, ind) -> str:
    return "(" + ", ".join(_expr(a, ind) for a in args) + ")"


def _dims(dims, ind) -> str:
    if not dims:
        return ""
    return "[" + ", ".join(_expr(d, ind) for d in dims) + "]"


def _expr(e: A.Expr, ind: int) -> str:
    if isinstance(e, A.Id):
        return e.name
    if isinstance(e, A.Literal):
        return _literal(e.value)
    if isinstance(e, A.Call):
        return _atom(e.callee, ind) + _dims(e.dims, ind) + _args(e.args, ind)
    if isinstance(e, A.If):
        return (f"if {_expr(e.cond, ind)} then {_expr(e.then, ind)} "
                f"else {_expr(e.else_, ind)} fi")
    if isinstance(e, A.HashQuery):
        if e.dim is None:
            return "#"
        if isinstance(e.dim, A.Id):
            return "#." + e.dim.name
        return "#(" + _expr(e.dim, ind) + ")"
    if isinstance(e, A.At):
        body, tag = _atom(e.body, ind), _atom(e.tag, ind)
        if e.dim is None:
            return f"({body} @ {tag})"
        return f"({body} @{_dim_suffix(e.dim)} {tag})"
    if isinstance(e, A.Where):
        pad = " " * (ind + 4)
        lines = [f"({_expr(e.body, ind)}", " " * ind + "where"]
        lines += [pad + _decl(d, ind + 4) for d in e.decls]
        lines.append(" " * ind + "end)")
        return "\n".join(lines)
    if isinstance(e, A.ArrayLit):
        return "[" + ", ".join(_expr(x, ind) for x in e.elements) + "]"
    if isinstance(e, A.Index):
        return _atom(e.array, ind) + "[" + ", ".join(_expr(x, ind) for x in e.indices) + "]"
    if isinstance(e, A.DotField):
        return f"{_atom(e.obj, ind)}.{e.name}"
    if isinstance(e, A.DotCall):
        return f"{_atom(e.obj, ind)}.{e.name}{_dims(e.dims, ind)}{_args(e.args, ind)}"
    if isinstance(e, A.EmbedRef):
        parts = [json.dumps(e.uri), json.dumps(e.method)] + [_expr(a, ind) for a in e.args]
        return "embed(" + ", ".join(parts) + ")"
    if isinstance(e, A.UnOp):
        if e.op in A.DATA_UNARY:
            return f"({e.op}{_atom(e.operand, ind)})"
        return f"({e.op}{_dim_suffix(e.dim)} {_atom(e.operand, ind)})"
    if isinstance(e, A.BinOp):
        lhs, rhs = _atom(e.lhs, ind), _atom(e.rhs, ind)
        return f"({lhs} {e.op}{_dim_suffix(e.dim)} {rhs})"
    raise TypeError(f"cannot print {type(e).__name__}")


def _decl(d: A.Decl, ind: int) -> str:
    if isinstance(d, A.DimensionDecl):
        return "dimension " + ", ".join(d.names) + ";"
    if isinstance(d, A.VarDecl):
        return f"{d.name} = {_expr(d.expr, ind)};"
    if isinstance(d, A.FuncDecl):
        dims = "[" + ", ".join(d.dims) + "]" if d.dims else ""
        return f"{d.name}{dims}({', '.join(d.formals)}) = {_expr(d.body, ind)};"
    if isinstance(d, A.IndexedDecl):
        idx = ", ".join(_expr(x, ind) for x in d.indices)
        return f"{d.name}[{idx}] = {_expr(d.expr, ind)};"
    if isinstance(d, A.FieldDecl):
        return f"{_atom(d.obj, ind)}.{d.name} = {_expr(d.expr, ind)};"
    if isinstance(d, A.ExprDecl):
        return _atom(d.expr, ind) + ";"
    if isinstance(d, A.BlockDecl):
        pad = " " * (ind + 4)
        lines = ["where"] + [pad + _decl(x, ind + 4) for x in d.decls]
        lines.append(" " * ind + "end;")
        return "\n".join(lines)
    raise TypeError(f"cannot print {type(d).__name__}")
