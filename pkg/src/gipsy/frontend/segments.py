"""Hybrid-program preprocessing: declarations, prototypes and code segments."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..core.dictionary import DictEntry, Dictionary
from ..core.errors import (DuplicatePrototype, InvalidSegment, LucidSyntaxError)
from ..core.types import GipsyType, prototype_type
from .lexer import Token, tokenize

MARKER = re.compile(r"^[ \t]*#([A-Z]+|funcdecl|typedecl)[ \t]*\r?$")

INTENSIONAL = {
    "GIPL": "gipl",
    "INDEXICALLUCID": "indexical",
    "JLUCID": "jlucid",
    "OBJECTIVELUCID": "objective",
}
NATIVE = "NATIVE"
# Host languages of the classic listings; kept as opaque text.
OPAQUE_HOST = frozenset({"JAVA", "CPP", "C", "PERL", "PYTHON", "FORTRAN", "SHELL"})
DIALECT_LANG = {v: k for k, v in INTENSIONAL.items()}
DEFAULT_LANG = "OBJECTIVELUCID"


@dataclass(frozen=True)
class Prototype:
    name: str
    immutable: bool
    return_type: GipsyType
    return_is_array: bool
    param_types: tuple  # ((GipsyType, is_array), ...)
    embed: tuple | None = None  # (lang_id | None, uri, remote name | None)
    pos: tuple | None = field(default=None, compare=False)

    def signature(self) -> str:
        def show(t, arr):
            return str(t) + ("[]" if arr else "")
        params = ",".join(show(t, a) for t, a in self.param_types)
        return f"({params})->{show(self.return_type, self.return_is_array)}"

    @property
    def arity(self) -> int:
        return len(self.param_types)

    @property
    def full_return_type(self) -> GipsyType:
        if self.return_is_array:
            return GipsyType("Array", element=self.return_type)
        return self.return_type

    def full_param_types(self) -> tuple:
        return tuple(GipsyType("Array", element=t) if a else t for t, a in self.param_types)


@dataclass(frozen=True)
class Segment:
    lang_id: str
    body: str
    start_line: int
    implicit: bool = False


@dataclass(frozen=True)
class Chunk:
    marker: str | None  # None for text before the first marker
    body: str
    start_line: int


@dataclass
class SegmentedProgram:
    func_decls: list
    type_decls: list
    segments: list
    chunks: list

    def reconstruct(self) -> str:
        """Source text with the marker lines removed."""
        return "".join(c.body for c in self.chunks)


def parse_segments(source: str, default_lang: str | None = None,
                   valid=None, invalid=None) -> SegmentedProgram:
    lines = source.splitlines(keepends=True)
    chunks: list[Chunk] = []
    marker, start, buf = None, 1, []
    seen_marker = False
    for lineno, line in enumerate(lines, 1):
        m = MARKER.match(line)
        if m:
            if seen_marker or buf:
                chunks.append(Chunk(marker, "".join(buf), start))
            marker, start, buf = m.group(1), lineno + 1, []
            seen_marker = True
        else:
            buf.append(line)
    if not seen_marker:
        lang = default_lang or DEFAULT_LANG
        _check_valid(lang, valid, invalid, 1)
        seg = Segment(lang, source, 1, implicit=True)
        return SegmentedProgram([], [], [seg], [Chunk(None, source, 1)])
    chunks.append(Chunk(marker, "".join(buf), start))

    protos: list[Prototype] = []
    types: list[str] = []
    segments: list[Segment] = []
    for ch in chunks:
        if ch.marker is None:
            if tokenize(ch.body, ch.start_line)[0].kind != "EOF":
                tok = tokenize(ch.body, ch.start_line)[0]
                raise LucidSyntaxError("text before the first segment marker", tok.pos)
        elif ch.marker == "funcdecl":
            protos.extend(parse_prototypes(ch.body, ch.start_line))
        elif ch.marker == "typedecl":
            types.extend(parse_typedecls(ch.body, ch.start_line))
        else:
            _check_valid(ch.marker, valid, invalid, ch.start_line - 1)
            segments.append(Segment(ch.marker, ch.body, ch.start_line))
    return SegmentedProgram(protos, types, segments, chunks)


def _check_valid(lang, valid, invalid, line):
    if invalid is not None and lang in invalid:
        raise InvalidSegment(f"segment #{lang} is not allowed", (line, 1))
    if valid is not None and lang not in valid:
        raise InvalidSegment(f"segment #{lang} is not allowed", (line, 1))


class _Tokens:
    def __init__(self, text: str, start_line: int):
        self.toks = tokenize(text, start_line, keywords=frozenset())
        self.i = 0

    def peek(self, k=0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def expect(self, op: str) -> Token:
        t = self.peek()
        if not t.is_op(op):
            raise LucidSyntaxError(f"expected {op!r}, found {t}", t.pos)
        return self.take()

    def ident(self, what="identifier") -> Token:
        t = self.peek()
        if t.kind != "ID":
            raise LucidSyntaxError(f"expected {what}, found {t}", t.pos)
        return self.take()

    def array_suffix(self) -> bool:
        if self.peek().is_op("[") and self.peek(1).is_op("]"):
            self.take()
            self.take()
            return True
        return False


def parse_prototypes(text: str, start_line: int = 1) -> list[Prototype]:
    ts = _Tokens(text, start_line)
    out = []
    while ts.peek().kind != "EOF":
        out.append(_prototype(ts))
    return out


def _prototype(ts: _Tokens) -> Prototype:
    first = ts.peek()
    immutable = False
    if first.kind == "ID" and first.text == "immutable" and ts.peek(1).kind == "ID":
        ts.take()
        immutable = True
    rtok = ts.ident("return type")
    rtype = prototype_type(rtok.text)
    rarr = ts.array_suffix()
    if rarr and rtype.kind == "Void":
        raise LucidSyntaxError("void cannot be an array element", rtok.pos)
    name = ts.ident("function name")
    ts.expect("(")
    params = []
    if not ts.peek().is_op(")"):
        while True:
            ptok = ts.ident("parameter type")
            ptype = prototype_type(ptok.text)
            if ptype.kind == "Void":
                raise LucidSyntaxError("void is not a parameter type", ptok.pos)
            params.append((ptype, ts.array_suffix()))
            if ts.peek().is_op(","):
                ts.take()
                continue
            break
    ts.expect(")")
    embed = None
    if ts.peek().is_op(":"):
        ts.take()
        lang = None
        if ts.peek().is_op("#"):
            ts.take()
            lt = ts.ident("language id")
            if not re.fullmatch(r"[A-Z]+", lt.text):
                raise LucidSyntaxError(f"bad language id {lt.text!r}", lt.pos)
            lang = lt.text
            ts.expect(":")
        ut = ts.peek()
        if ut.kind != "STRING":
            raise LucidSyntaxError(f"expected URI literal, found {ut}", ut.pos)
        uri = ts.take().value
        remote = None
        if ts.peek().is_op(":"):
            ts.take()
            remote = ts.ident("remote name").text
        embed = (lang, uri, remote)
    ts.expect(";")
    return Prototype(name.text, immutable, rtype, rarr, tuple(params), embed, pos=first.pos)


def parse_typedecls(text: str, start_line: int = 1) -> list[str]:
    ts = _Tokens(text, start_line)
    out = []
    while ts.peek().kind != "EOF":
        out.append(ts.ident("type name").text)
        ts.expect(";")
    return out


def build_stub_dictionary(prog: SegmentedProgram) -> Dictionary:
    d = Dictionary()
    for p in prog.func_decls:
        if d.local(p.name) is not None:
            raise DuplicatePrototype(f"function {p.name!r} declared twice", p.pos)
        d = d.extend(p.name, DictEntry("FreeFun", (p, None)))
    for t in prog.type_decls:
        if d.local(t) is not None:
            raise DuplicatePrototype(f"name {t!r} declared twice")
        d = d.extend(t, DictEntry("Class", (t, None)))
    return d
