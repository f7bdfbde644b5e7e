"""Rewrite Indexical Lucid stream operators into the @/# core.

    first.d X    ->  X @.d 0
    next.d X     ->  X @.d (#.d + 1)
    prev.d X     ->  X @.d (#.d - 1)
    X fby.d Y    ->  if #.d <= 0 then X else Y @.d (#.d - 1) fi
    X wvr.d Y    ->  X @.d T where T = U fby.d (U @.d (T + 1));
                                   U = if Y then #.d else next.d U fi; end
    X asa.d Y    ->  first.d (X wvr.d Y)
    X upon.d Y   ->  X @.d W where W = 0 fby.d (if Y then W + 1 else W fi); end

Helper streams get fresh names, so they never capture user identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import ast as A
from .core.errors import AmbiguousDimension, Unsupported
from .core.values import Int


@dataclass
class RewriteEnv:
    taken: set = field(default_factory=set)
    counters: dict = field(default_factory=dict)


def fresh_id(env: RewriteEnv, hint: str) -> str:
    n = env.counters.get(hint, 0)
    while f"{hint}__{n}" in env.taken:
        n += 1
    name = f"{hint}__{n}"
    env.taken.add(name)
    env.counters[hint] = n + 1
    return name


def _lit(n: int) -> A.Literal:
    return A.Literal(Int(n))


def _names(root: A.Node) -> set:
    out = set()
    for n in A.walk(root):
        if isinstance(n, A.Id):
            out.add(n.name)
        elif isinstance(n, (A.VarDecl, A.IndexedDecl)):
            out.add(n.name)
        elif isinstance(n, A.FuncDecl):
            out.add(n.name)
            out.update(n.formals)
            out.update(n.dims)
        elif isinstance(n, A.DimensionDecl):
            out.update(n.names)
    return out


def _dim_uses(root: A.Node):
    """Dimension expressions in qualifier positions, and whether any are implied."""
    used, implied = [], False
    for n in A.walk(root):
        d = None
        if isinstance(n, (A.UnOp, A.BinOp)):
            if n.op in A.DIALECT_UNARY or n.op in A.DIALECT_BINARY:
                d = n.dim
                implied |= d is None
        elif isinstance(n, A.At):
            d = n.dim
            implied |= d is None
        elif isinstance(n, A.HashQuery):
            d = n.dim
            implied |= d is None
        if isinstance(d, A.Id):
            used.append(d.name)
    return used, implied


def _declare_dimensions(root: A.Expr, env: RewriteEnv) -> A.Expr:
    """Programs that declare no dimension get one for each name used as one."""
    if any(isinstance(n, A.DimensionDecl) for n in A.walk(root)):
        return root
    defined = set()
    for n in A.walk(root):
        if isinstance(n, (A.VarDecl, A.IndexedDecl, A.FuncDecl)):
            defined.add(n.name)
        if isinstance(n, A.FuncDecl):
            defined.update(n.formals)
    used, implied = _dim_uses(root)
    names = list(dict.fromkeys(u for u in used if u not in defined))
    if not names and implied:
        names = ["d"] if "d" not in env.taken else [fresh_id(env, "d")]
        env.taken.add(names[0])
    if not names:
        return root
    decl = A.DimensionDecl(tuple(names), pos=root.pos)
    if isinstance(root, A.Where):
        return A.Where(root.body, (decl,) + root.decls, pos=root.pos)
    return A.Where(root, (decl,), pos=root.pos)


class _Rewriter:
    def __init__(self, env: RewriteEnv):
        self.env = env

    def dim(self, d: A.Expr | None, scope: tuple, pos) -> A.Expr:
        if d is not None:
            return d
        if len(scope) == 1:
            return A.Id(scope[0], pos=pos)
        if not scope:
            raise AmbiguousDimension("operator has no dimension and none is in scope", pos)
        raise AmbiguousDimension(
            f"operator has no dimension and {len(scope)} are in scope: {', '.join(scope)}",
            pos)

    def rewrite(self, node: A.Node, scope: tuple) -> A.Node:
        if isinstance(node, A.Where):
            declared = [n for dd in node.decls if isinstance(dd, A.DimensionDecl)
                        for n in dd.names]
            inner = tuple(dict.fromkeys(scope + tuple(declared)))
            return A.map_children(node, lambda c: self.rewrite(c, inner))
        if isinstance(node, A.FuncDecl) and node.dims:
            inner = tuple(dict.fromkeys(scope + node.dims))
            return A.map_children(node, lambda c: self.rewrite(c, inner))
        node = A.map_children(node, lambda c: self.rewrite(c, scope))
        pos = node.pos
        if isinstance(node, A.At) and node.dim is None:
            return A.At(node.body, self.dim(None, scope, pos), node.tag, pos=pos)
        if isinstance(node, A.HashQuery) and node.dim is None:
            return A.HashQuery(self.dim(None, scope, pos), pos=pos)
        if isinstance(node, A.UnOp) and node.op in A.DIALECT_UNARY:
            return self.unary(node, scope)
        if isinstance(node, A.BinOp) and node.op in A.DIALECT_BINARY:
            return self.binary(node, scope)
        return node

    def unary(self, node: A.UnOp, scope) -> A.Expr:
        pos = node.pos
        if node.op == "iseod":
            raise Unsupported("iseod is not supported", pos)
        d = self.dim(node.dim, scope, pos)
        x = node.operand
        if node.op == "first":
            return A.At(x, d, _lit(0), pos=pos)
        step = "+" if node.op == "next" else "-"
        return A.At(x, d, A.BinOp(step, A.HashQuery(d, pos=pos), _lit(1), pos=pos), pos=pos)

    def fby(self, x, y, d, pos) -> A.Expr:
        h = A.HashQuery(d, pos=pos)
        return A.If(A.BinOp("<=", h, _lit(0), pos=pos), x,
                    A.At(y, d, A.BinOp("-", h, _lit(1), pos=pos), pos=pos), pos=pos)

    def wvr(self, x, y, d, pos) -> A.Expr:
        t = A.Id(fresh_id(self.env, "wvrT"), pos=pos)
        u = A.Id(fresh_id(self.env, "wvrU"), pos=pos)
        h = A.HashQuery(d, pos=pos)
        next_u = A.At(u, d, A.BinOp("+", h, _lit(1), pos=pos), pos=pos)
        t_def = self.fby(u, A.At(u, d, A.BinOp("+", t, _lit(1), pos=pos), pos=pos), d, pos)
        u_def = A.If(y, h, next_u, pos=pos)
        return A.Where(A.At(x, d, t, pos=pos),
                       (A.VarDecl(t.name, t_def, pos=pos), A.VarDecl(u.name, u_def, pos=pos)),
                       pos=pos)

    def binary(self, node: A.BinOp, scope) -> A.Expr:
        pos = node.pos
        d = self.dim(node.dim, scope, pos)
        x, y = node.lhs, node.rhs
        if node.op == "fby":
            return self.fby(x, y, d, pos)
        if node.op == "wvr":
            return self.wvr(x, y, d, pos)
        if node.op == "asa":
            return A.At(self.wvr(x, y, d, pos), d, _lit(0), pos=pos)
        w = A.Id(fresh_id(self.env, "uponW"), pos=pos)
        step = A.If(y, A.BinOp("+", w, _lit(1), pos=pos), w, pos=pos)
        return A.Where(A.At(x, d, w, pos=pos),
                       (A.VarDecl(w.name, self.fby(_lit(0), step, d, pos), pos=pos),),
                       pos=pos)


def translate(ast: A.Expr, env: RewriteEnv | None = None) -> A.Expr:
    """Return an equivalent tree with no stream operators left."""
    env = env or RewriteEnv()
    env.taken |= _names(ast)
    ast = _declare_dimensions(ast, env)
    return _Rewriter(env).rewrite(ast, ())


def dialect_operators(ast: A.Node) -> list:
    return [n for n in A.walk(ast) if A.is_dialect(n)]


def flatten_blocks(ast: A.Node) -> A.Node:
    """Splice `defs; where defs end;` blocks into the enclosing definition list."""
    def spread(decls):
        for d in decls:
            if isinstance(d, A.BlockDecl):
                yield from spread(d.decls)
            else:
                yield d

    def go(n):
        n = A.map_children(n, go)
        if isinstance(n, A.Where) and any(isinstance(d, A.BlockDecl) for d in n.decls):
            return A.Where(n.body, tuple(spread(n.decls)), pos=n.pos)
        return n

    return go(ast)
