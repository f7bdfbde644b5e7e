"""Recursive-descent parser for GIPL and Indexical Lucid (plus extensions).

One grammar serves every dialect. In GIPL mode the Indexical stream
operators and the implied-dimension forms of ``@``/``#`` are rejected.

Precedence, loosest first::

    where
    fby wvr asa upon        (right associative, optional .d qualifier)
    ||
    &&
    |
    &
    < > <= >= == != =
    + -
    * / %
    unary - ! first next prev iseod
    @
    #
    call, index, .field, .method(...)
"""

from __future__ import annotations

from ..core import ast as A
from ..core.errors import LucidSyntaxError
from ..core.values import Bool, Double, Float, Int, Str
from .lexer import Token, tokenize

STREAM_BINARY = ("fby", "wvr", "asa", "upon")
STREAM_UNARY = ("first", "next", "prev", "iseod")
RELATIONAL = ("<", ">", "<=", ">=", "==", "!=", "=")

_EXPR_START_KW = {"if", "first", "next", "prev", "iseod", "embed", "true", "false"}


def _starts_expr(tok: Token) -> bool:
    """Can ``tok`` begin an operand? Binary-ambiguous ``-`` is excluded."""
    if tok.kind in ("INT", "DOUBLE", "FLOAT", "STRING", "ID"):
        return True
    if tok.kind == "OP":
        return tok.text in ("(", "[", "#", "!")
    return tok.kind == "KW" and tok.text in _EXPR_START_KW


class Parser:
    def __init__(self, text: str, dialect: str = "indexical", start_line: int = 1):
        self.toks = tokenize(text, start_line)
        self.i = 0
        self.gipl = dialect == "gipl"

    # token helpers
    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def fail(self, expected, tok: Token | None = None):
        tok = tok or self.peek()
        if isinstance(expected, (list, tuple, set, frozenset)):
            expected = ", ".join(sorted(expected))
        raise LucidSyntaxError(f"expected {expected}, found {tok}", tok.pos)

    def expect_op(self, op: str) -> Token:
        if not self.peek().is_op(op):
            self.fail(repr(op))
        return self.advance()

    def expect_kw(self, kw: str) -> Token:
        if not self.peek().is_kw(kw):
            self.fail(repr(kw))
        return self.advance()

    def expect_id(self) -> Token:
        if self.peek().kind != "ID":
            self.fail("identifier")
        return self.advance()

    def gipl_reject(self, what: str, tok: Token):
        if self.gipl:
            raise LucidSyntaxError(f"{what} is not part of GIPL", tok.pos)

    # entry point
    def parse_program(self) -> A.Expr:
        e = self.expr()
        if self.peek().is_op(";"):
            self.advance()
        if self.peek().kind != "EOF":
            self.fail("end of input")
        return e

    # where
    def expr(self) -> A.Expr:
        e = self.stream_expr()
        while self.peek().is_kw("where"):
            self.advance()
            decls = self.decls(("end",))
            self.expect_kw("end")
            e = A.Where(e, decls, pos=e.pos)
        return e

    def stream_expr(self) -> A.Expr:
        lhs = self.or_expr()
        tok = self.peek()
        if tok.kind == "KW" and tok.text in STREAM_BINARY:
            self.gipl_reject(tok.text, tok)
            self.advance()
            dim = self.qualifier()
            rhs = self.stream_expr()
            return A.BinOp(tok.text, lhs, rhs, dim, pos=lhs.pos)
        return lhs

    def qualifier(self):
        if self.peek().is_op(".") and self.peek(1).kind == "ID":
            self.advance()
            t = self.advance()
            return A.Id(t.text, pos=t.pos)
        return None

    def _left(self, sub, ops):
        e = sub()
        while self.peek().kind == "OP" and self.peek().text in ops:
            op = self.advance().text
            e = A.BinOp(op, e, sub(), pos=e.pos)
        return e

    def or_expr(self):
        return self._left(self.and_expr, ("||",))

    def and_expr(self):
        return self._left(self.bor_expr, ("&&",))

    def bor_expr(self):
        return self._left(self.band_expr, ("|",))

    def band_expr(self):
        return self._left(self.rel_expr, ("&",))

    def rel_expr(self):
        return self._left(self.add_expr, RELATIONAL)

    def add_expr(self):
        return self._left(self.mul_expr, ("+", "-"))

    def mul_expr(self):
        return self._left(self.unary, ("*", "/", "%"))

    def unary(self) -> A.Expr:
        tok = self.peek()
        if tok.is_op("-", "!"):
            self.advance()
            return A.UnOp(tok.text, self.unary(), pos=tok.pos)
        if tok.kind == "KW" and tok.text in STREAM_UNARY:
            self.gipl_reject(tok.text, tok)
            self.advance()
            dim = self.qualifier()
            return A.UnOp(tok.text, self.unary(), dim, pos=tok.pos)
        return self.at_expr()

    def tag_operand(self) -> A.Expr:
        tok = self.peek()
        if tok.is_op("-", "!"):
            self.advance()
            return A.UnOp(tok.text, self.tag_operand(), pos=tok.pos)
        return self.hash_expr()

    def at_expr(self) -> A.Expr:
        e = self.hash_expr()
        while self.peek().is_op("@"):
            at = self.advance()
            nxt = self.peek()
            if nxt.is_op("["):
                e = self.context_pairs(e)
                continue
            if nxt.is_op("."):
                self.advance()
                if self.peek().kind == "ID":
                    t = self.advance()
                    dim, tag = A.Id(t.text, pos=t.pos), self.tag_operand()
                elif self.peek().is_op("("):
                    inner = self.paren()
                    if _starts_expr(self.peek()):
                        dim, tag = inner, self.tag_operand()
                    else:
                        self.gipl_reject("'@.(E)' without a tag", at)
                        dim, tag = None, inner
                else:
                    self.fail("dimension after '@.'")
            elif nxt.kind == "ID" and _starts_expr(self.peek(1)):
                self.advance()
                dim, tag = A.Id(nxt.text, pos=nxt.pos), self.tag_operand()
            else:
                self.gipl_reject("'E @ E' without a dimension", at)
                if not _starts_expr(self.peek()) and not self.peek().is_op("-"):
                    self.fail("tag expression")
                dim, tag = None, self.tag_operand()
            e = A.At(e, dim, tag, pos=e.pos)
        return e

    def context_pairs(self, body: A.Expr) -> A.Expr:
        self.expect_op("[")
        while True:
            dim = self.expr()
            self.expect_op(":")
            tag = self.expr()
            body = A.At(body, dim, tag, pos=body.pos)
            if self.peek().is_op(","):
                self.advance()
                continue
            self.expect_op("]")
            return body

    def hash_expr(self) -> A.Expr:
        tok = self.peek()
        if not tok.is_op("#"):
            return self.postfix()
        self.advance()
        nxt = self.peek()
        if nxt.is_op("."):
            self.advance()
            if self.peek().kind == "ID":
                t = self.advance()
                return A.HashQuery(A.Id(t.text, pos=t.pos), pos=tok.pos)
            if self.peek().is_op("("):
                return A.HashQuery(self.paren(), pos=tok.pos)
            self.fail("dimension after '#.'")
        if nxt.kind == "ID":
            self.advance()
            return A.HashQuery(A.Id(nxt.text, pos=nxt.pos), pos=tok.pos)
        if nxt.is_op("("):
            return A.HashQuery(self.paren(), pos=tok.pos)
        self.gipl_reject("'#' without a dimension", tok)
        return A.HashQuery(None, pos=tok.pos)

    def postfix(self) -> A.Expr:
        e = self.primary()
        while True:
            tok = self.peek()
            if tok.is_op("(") and _callable(e):
                args = self.arglist()
                dims = ()
                if isinstance(e, A.Index):
                    dims, e = e.indices, e.array
                if isinstance(e, A.DotField):
                    e = A.DotCall(e.obj, e.name, args, dims, pos=e.pos)
                else:
                    e = A.Call(e, args, dims, pos=e.pos)
            elif tok.is_op("["):
                self.advance()
                idx = self.exprlist("]")
                e = A.Index(e, idx, pos=e.pos)
            elif tok.is_op(".") and self.peek(1).kind == "ID":
                self.advance()
                name = self.advance().text
                e = A.DotField(e, name, pos=e.pos)
            else:
                return e

    def arglist(self) -> tuple:
        self.expect_op("(")
        if self.peek().is_op(")"):
            self.advance()
            return ()
        return self.exprlist(")")

    def exprlist(self, close: str) -> tuple:
        items = [self.expr()]
        while self.peek().is_op(","):
            self.advance()
            items.append(self.expr())
        self.expect_op(close)
        return tuple(items)

    def paren(self) -> A.Expr:
        self.expect_op("(")
        e = self.expr()
        self.expect_op(")")
        return e

    def primary(self) -> A.Expr:
        tok = self.peek()
        k = tok.kind
        if k == "INT":
            self.advance()
            return A.Literal(Int(tok.value), pos=tok.pos)
        if k == "DOUBLE":
            self.advance()
            return A.Literal(Double(tok.value), pos=tok.pos)
        if k == "FLOAT":
            self.advance()
            return A.Literal(Float(tok.value), pos=tok.pos)
        if k == "STRING":
            self.advance()
            return A.Literal(Str(tok.value), pos=tok.pos)
        if k == "ID":
            self.advance()
            return A.Id(tok.text, pos=tok.pos)
        if tok.is_kw("true", "false"):
            self.advance()
            return A.Literal(Bool(tok.text == "true"), pos=tok.pos)
        if tok.is_op("("):
            return self.paren()
        if tok.is_op("["):
            self.advance()
            if self.peek().is_op("]"):
                self.fail("array element")
            items = self.exprlist("]")
            return A.ArrayLit(items, pos=tok.pos)
        if tok.is_kw("if"):
            return self.if_expr()
        if tok.is_kw("embed"):
            return self.embed()
        self.fail("expression")

    def embed(self) -> A.Expr:
        tok = self.advance()
        self.expect_op("(")
        if self.peek().kind != "STRING":
            self.fail("URI string")
        uri = self.advance().value
        self.expect_op(",")
        if self.peek().kind not in ("STRING", "ID"):
            self.fail("method name")
        m = self.advance()
        method = m.value if m.kind == "STRING" else m.text
        args = []
        while self.peek().is_op(","):
            self.advance()
            args.append(self.expr())
        self.expect_op(")")
        return A.EmbedRef(uri, method, tuple(args), pos=tok.pos)

    def if_expr(self) -> A.Expr:
        tok = self.advance()
        cond = self.stream_expr()
        if self.peek().is_kw("then"):
            self.advance()
        then = self.branch()
        self.expect_kw("else")
        else_ = self.branch()
        if self.peek().is_kw("fi"):
            self.advance()
            return A.If(cond, then, else_, pos=tok.pos)
        # Without `fi` a trailing where clause scopes over the whole conditional.
        if isinstance(else_, A.Where):
            inner = A.If(cond, then, else_.body, pos=tok.pos)
            return A.Where(inner, else_.decls, pos=tok.pos)
        return A.If(cond, then, else_, pos=tok.pos)

    def branch(self) -> A.Expr:
        e = self.expr()
        if self.peek().is_kw("dimension") or self.definition_ahead():
            decls = self.decls(("else", "fi", "end"))
            e = A.Where(e, decls, pos=e.pos)
        return e

    # declarations
    def definition_ahead(self) -> bool:
        """Does a definition (``f(x) = ...``, ``S[i] = ...``, ``x = ...``) start here?"""
        toks, j = self.toks, self.i
        if toks[j].kind != "ID":
            return False
        j += 1
        if toks[j].is_op(".") and toks[j + 1].kind == "ID":
            if toks[j + 2].is_op("="):
                return True
            j += 2
            while toks[j].is_op(",") and toks[j + 1].kind == "ID":
                j += 2
            if not toks[j].is_op("("):
                return False
        if toks[j].is_op("["):
            j = _skip_balanced(toks, j)
            if j is None:
                return False
        if toks[j].is_op("("):
            j = _skip_balanced(toks, j)
            if j is None:
                return False
        return toks[j].is_op("=")

    def decls(self, terminators) -> tuple:
        items = []
        while True:
            tok = self.peek()
            if tok.kind == "EOF" or (tok.kind == "KW" and tok.text in terminators):
                break
            items.append(self.decl_item(terminators))
        if not items:
            self.fail("declaration")
        return tuple(items)

    def end_item(self, terminators):
        tok = self.peek()
        if tok.is_op(";"):
            self.advance()
        elif not (tok.kind == "KW" and tok.text in terminators):
            self.fail("';'")

    def decl_item(self, terminators) -> A.Decl:
        tok = self.peek()
        if tok.is_kw("dimension"):
            self.advance()
            names = [self.expect_id().text]
            while self.peek().is_op(","):
                self.advance()
                names.append(self.expect_id().text)
            self.end_item(terminators)
            return A.DimensionDecl(tuple(names), pos=tok.pos)
        if tok.is_kw("where"):
            self.advance()
            inner = self.decls(("end",))
            self.expect_kw("end")
            if self.peek().is_op(";"):
                self.advance()
            return A.BlockDecl(inner, pos=tok.pos)
        if self.definition_ahead():
            d = self.definition()
        else:
            d = A.ExprDecl(self.expr(), pos=tok.pos)
        self.end_item(terminators)
        return d

    def definition(self) -> A.Decl:
        name_tok = self.advance()
        name, pos = name_tok.text, name_tok.pos
        dims: tuple = ()
        if self.peek().is_op("."):
            self.advance()
            first = self.expect_id().text
            if self.peek().is_op("="):
                self.advance()
                return A.FieldDecl(A.Id(name, pos=pos), first, self.expr(), pos=pos)
            names = [first]
            while self.peek().is_op(","):
                self.advance()
                names.append(self.expect_id().text)
            dims = tuple(names)
            formals = self.formals()
            self.expect_op("=")
            return A.FuncDecl(name, formals, self.expr(), dims, pos=pos)
        if self.peek().is_op("["):
            self.advance()
            idx = self.exprlist("]")
            if self.peek().is_op("("):
                if not all(isinstance(x, A.Id) for x in idx):
                    self.fail("dimension identifiers in '[...]'")
                formals = self.formals()
                self.expect_op("=")
                return A.FuncDecl(name, formals, self.expr(),
                                  tuple(x.name for x in idx), pos=pos)
            self.expect_op("=")
            return A.IndexedDecl(name, idx, self.expr(), pos=pos)
        if self.peek().is_op("("):
            formals = self.formals()
            self.expect_op("=")
            return A.FuncDecl(name, formals, self.expr(), pos=pos)
        self.expect_op("=")
        return A.VarDecl(name, self.expr(), pos=pos)

    def formals(self) -> tuple:
        self.expect_op("(")
        names = []
        if not self.peek().is_op(")"):
            names.append(self.expect_id().text)
            while self.peek().is_op(","):
                self.advance()
                names.append(self.expect_id().text)
        self.expect_op(")")
        return tuple(names)


def _callable(e) -> bool:
    if isinstance(e, (A.Id, A.DotField)):
        return True
    return isinstance(e, A.Index) and isinstance(e.array, (A.Id, A.DotField))


def _skip_balanced(toks, j):
    """Index just past the bracket group opening at ``j``, or None."""
    opener = toks[j].text
    closer = {"(": ")", "[": "]"}[opener]
    depth = 0
    while j < len(toks):
        t = toks[j]
        if t.kind == "EOF":
            return None
        if t.is_op(opener):
            depth += 1
        elif t.is_op(closer):
            depth -= 1
            if depth == 0:
                return j + 1
        elif t.is_op(";") or t.is_kw("where", "end"):
            return None
        j += 1
    return None


def parse_gipl(text: str, start_line: int = 1) -> A.Expr:
    return Parser(text, "gipl", start_line).parse_program()


def parse_indexical(text: str, start_line: int = 1) -> A.Expr:
    return Parser(text, "indexical", start_line).parse_program()


def parse(text: str, dialect: str = "indexical", start_line: int = 1) -> A.Expr:
    if dialect == "gipl":
        return parse_gipl(text, start_line)
    return parse_indexical(text, start_line)
