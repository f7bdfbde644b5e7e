"""Tokenizer shared by the Lucid parsers and the prototype grammar."""

from __future__ import annotations

from dataclasses import dataclass

from ..core.errors import LucidSyntaxError

KEYWORDS = frozenset({
    "if", "then", "else", "fi", "where", "end", "dimension",
    "first", "next", "prev", "iseod", "fby", "wvr", "asa", "upon",
    "embed", "true", "false",
})

# Longest first so that "<=" wins over "<".
PUNCT = ("<=", ">=", "==", "!=", "&&", "||",
         "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|",
         "@", "#", ".", ",", ";", ":", "(", ")", "[", "]", "{", "}")

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", '"': '"', "'": "'", "0": "\0"}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str   # ID, KW, INT, DOUBLE, FLOAT, STRING, OP, EOF
    text: str
    line: int
    col: int
    value: object = None

    @property
    def pos(self):
        return (self.line, self.col)

    def is_op(self, *ops) -> bool:
        return self.kind == "OP" and self.text in ops

    def is_kw(self, *kws) -> bool:
        return self.kind == "KW" and self.text in kws

    def __str__(self):
        return "end of input" if self.kind == "EOF" else repr(self.text)


def tokenize(text: str, start_line: int = 1, keywords=KEYWORDS) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    line, col = start_line, 1

    def advance(k: int):
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch in " \t\r\n\f\v":
            advance(1)
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise LucidSyntaxError("unterminated comment", (line, col))
            advance(j + 2 - i)
            continue
        start = (line, col)
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "KW" if word in keywords else "ID"
            toks.append(Token(kind, word, *start))
            advance(j - i)
            continue
        if ch.isdigit():
            tok, length = _number(text, i, start)
            toks.append(tok)
            advance(length)
            continue
        if ch in "\"'":
            value, length = _string(text, i, start)
            toks.append(Token("STRING", text[i:i + length], *start, value=value))
            advance(length)
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                toks.append(Token("OP", p, *start))
                advance(len(p))
                break
        else:
            raise LucidSyntaxError(f"unexpected character {ch!r}", start)
    toks.append(Token("EOF", "", line, col))
    return toks


def _number(text: str, i: int, start) -> tuple[Token, int]:
    n = len(text)
    j = i
    while j < n and text[j].isdigit():
        j += 1
    is_real = False
    if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
        is_real = True
        j += 1
        while j < n and text[j].isdigit():
            j += 1
    if j < n and text[j] in "eE":
        k = j + 1
        if k < n and text[k] in "+-":
            k += 1
        if k < n and text[k].isdigit():
            is_real = True
            j = k
            while j < n and text[j].isdigit():
                j += 1
    lexeme = text[i:j]
    if j < n and text[j] in "fF":
        return Token("FLOAT", lexeme + text[j], *start, value=float(lexeme)), j + 1 - i
    if j < n and (text[j].isalpha() or text[j] == "_"):
        raise LucidSyntaxError(f"malformed number {text[i:j + 1]!r}", start)
    if is_real:
        return Token("DOUBLE", lexeme, *start, value=float(lexeme)), j - i
    value = int(lexeme)
    if value > 2 ** 63 - 1:
        raise LucidSyntaxError(f"integer literal {lexeme} overflows 64 bits", start)
    return Token("INT", lexeme, *start, value=value), j - i


def _string(text: str, i: int, start) -> tuple[str, int]:
    quote = text[i]
    out = []
    j = i + 1
    while j < len(text):
        ch = text[j]
        if ch == quote:
            return "".join(out), j + 1 - i
        if ch == "\n":
            break
        if ch == "\\" and j + 1 < len(text):
            out.append(_ESCAPES.get(text[j + 1], text[j + 1]))
            j += 2
            continue
        out.append(ch)
        j += 1
    raise LucidSyntaxError("unterminated string literal", start)
