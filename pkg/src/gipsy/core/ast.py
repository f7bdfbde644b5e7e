"""Abstract syntax for the Lucid dialects.

Every node is a frozen dataclass. Source positions are carried in ``pos`` but
excluded from equality, so a pretty-printed and reparsed tree compares equal
to the original.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterator

from .values import Value



@dataclass(frozen=True)
class Node:
    pos: tuple | None = field(default=None, compare=False, repr=False, kw_only=True)


class Expr(Node):
    pass


class Decl(Node):
    pass


@dataclass(frozen=True)
class Id(Expr):
    name: str


@dataclass(frozen=True)
class Literal(Expr):
    value: Value


@dataclass(frozen=True)
class Call(Expr):
    callee: Expr
    args: tuple = ()
    dims: tuple = ()  # `f[d](...)` subscripts; informational only


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    else_: Expr


@dataclass(frozen=True)
class HashQuery(Expr):
    dim: Expr


@dataclass(frozen=True)
class At(Expr):
    body: Expr
    dim: Expr | None  # None: implied dimension, resolved by the translator
    tag: Expr


@dataclass(frozen=True)
class Where(Expr):
    body: Expr
    decls: tuple

    def __post_init__(self):
        if not self.decls:
            raise ValueError("where clause needs at least one declaration")


@dataclass(frozen=True)
class ArrayLit(Expr):
    elements: tuple


@dataclass(frozen=True)
class Index(Expr):
    array: Expr
    indices: tuple


@dataclass(frozen=True)
class DotField(Expr):
    obj: Expr
    name: str


@dataclass(frozen=True)
class DotCall(Expr):
    obj: Expr
    name: str
    args: tuple = ()
    dims: tuple = ()


@dataclass(frozen=True)
class EmbedRef(Expr):
    uri: str
    method: str
    args: tuple = ()


@dataclass(frozen=True)
class UnOp(Expr):
    op: str
    operand: Expr
    dim: Expr | None = None


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr
    dim: Expr | None = None


@dataclass(frozen=True)
class DimensionDecl(Decl):
    names: tuple


@dataclass(frozen=True)
class VarDecl(Decl):
    name: str
    expr: Expr


@dataclass(frozen=True)
class FuncDecl(Decl):
    name: str
    formals: tuple
    body: Expr
    dims: tuple = ()  # `f.d1,d2(x) = E` / `f[d](x) = E`


@dataclass(frozen=True)
class IndexedDecl(Decl):
    """`S[i, j] = E;` element definitions (array-style listings)."""
    name: str
    indices: tuple
    expr: Expr


@dataclass(frozen=True)
class FieldDecl(Decl):
    """`E.id = E;` assignments seen in object-style listings."""
    obj: Expr
    name: str
    expr: Expr


@dataclass(frozen=True)
class ExprDecl(Decl):
    """A bare expression used as a statement inside a where body."""
    expr: Expr


@dataclass(frozen=True)
class BlockDecl(Decl):
    """A nested `where ... end` block inside a declaration list."""
    decls: tuple


DIALECT_UNARY = frozenset({"first", "next", "prev", "iseod"})
DIALECT_BINARY = frozenset({"fby", "wvr", "asa", "upon"})
DATA_UNARY = frozenset({"-", "!"})
DATA_BINARY = frozenset({"+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=",
                         "=", "&&", "||", "&", "|"})


def is_dialect(node: Node) -> bool:
    return ((isinstance(node, UnOp) and node.op in DIALECT_UNARY)
            or (isinstance(node, BinOp) and node.op in DIALECT_BINARY))


def children(node: Node) -> Iterator[Node]:
    """Direct child nodes, in field order."""
    for f in dataclasses.fields(node):
        if f.name == "pos":
            continue
        v = getattr(node, f.name)
        if isinstance(v, Node):
            yield v
        elif isinstance(v, tuple):
            for x in v:
                if isinstance(x, Node):
                    yield x


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal, iterative so deep trees are fine."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def map_children(node: Node, fn) -> Node:
    """Rebuild ``node`` with ``fn`` applied to every direct child node."""
    changes = {}
    for f in dataclasses.fields(node):
        if f.name == "pos":
            continue
        v = getattr(node, f.name)
        if isinstance(v, Node):
            nv = fn(v)
            if nv is not v:
                changes[f.name] = nv
        elif isinstance(v, tuple) and any(isinstance(x, Node) for x in v):
            nv = tuple(fn(x) if isinstance(x, Node) else x for x in v)
            if any(a is not b for a, b in zip(nv, v)):
                changes[f.name] = nv
    if not changes:
        return node
    return dataclasses.replace(node, **changes)
