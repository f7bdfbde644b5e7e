"""Definition environments (D in the semantic rules)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import UndefinedIdentifier

ENTRY_KINDS = ("Const", "Op", "Dim", "Func", "Var", "Formal", "FreeFun", "Class",
               "ClassVar", "ClassFun")


@dataclass(frozen=True)
class DictEntry:
    """A classified definition.

    ``data`` depends on ``kind``:

    * Const: the Value
    * Op: builtin operator id
    * Dim: None
    * Func: (formals, body expr)
    * Var: the defining expression
    * Formal: parameter position
    * FreeFun: (prototype, host binding name or None)
    * Class: (class name, linked record type name or None)
    * ClassVar: (owner, field name, host type)
    * ClassFun: (owner, method name, signature text)
    """
    kind: str
    data: Any = None

    def __post_init__(self):
        if self.kind not in ENTRY_KINDS:
            raise ValueError(f"unknown entry kind {self.kind!r}")

    def detail(self) -> str:
        from ..frontend.printer import pretty  # local: printer depends on core
        k, d = self.kind, self.data
        if k == "Const":
            from .values import render
            return render(d)
        if k == "Op":
            return str(d)
        if k == "Dim":
            return ""
        if k == "Func":
            formals, body = d
            return "(" + ",".join(formals) + ") = " + pretty(body)
        if k == "Var":
            return pretty(d)
        if k == "Formal":
            return str(d)
        if k == "FreeFun":
            proto, binding = d
            return f"{proto.signature()} -> {binding or '?'}"
        if k == "Class":
            name, linked = d
            return linked or "?"
        if k == "ClassVar":
            owner, name, htype = d
            return f"{owner}.{name}:{htype}"
        if k == "ClassFun":
            owner, name, sig = d
            return f"{owner}.{name}{sig}"
        return repr(d)


@dataclass(frozen=True)
class Scope:
    id: str
    parent: str | None
    entries: dict = field(default_factory=dict, compare=True)

    def __hash__(self):
        return hash((self.id, self.parent))


class Dictionary:
    """Scoped environment.

    Every scope ever pushed is retained (keyed by id) so the complete symbol
    table of a program can be listed; ``current`` selects the innermost scope
    for lookups. Operations are functional: ``push``/``extend``/``pop`` return
    new dictionaries and never mutate an existing scope.
    """

    __slots__ = ("scopes", "current")

    def __init__(self, scopes=None, current: str = "global"):
        if scopes is None:
            scopes = {"global": Scope("global", None, {})}
        self.scopes = dict(scopes)
        self.current = current

    def push(self, scope_id: str) -> "Dictionary":
        if scope_id in self.scopes:
            raise ValueError(f"scope {scope_id!r} already exists")
        scopes = dict(self.scopes)
        scopes[scope_id] = Scope(scope_id, self.current, {})
        return Dictionary(scopes, scope_id)

    def pop(self) -> "Dictionary":
        parent = self.scopes[self.current].parent
        if parent is None:
            raise ValueError("cannot pop the global scope")
        return Dictionary(self.scopes, parent)

    def enter(self, scope_id: str) -> "Dictionary":
        return Dictionary(self.scopes, scope_id)

    def extend(self, name: str, entry: DictEntry) -> "Dictionary":
        cur = self.scopes[self.current]
        entries = dict(cur.entries)
        entries[name] = entry
        scopes = dict(self.scopes)
        scopes[self.current] = Scope(cur.id, cur.parent, entries)
        return Dictionary(scopes, self.current)

    def resolve(self, name: str) -> tuple[str, DictEntry] | None:
        sid = self.current
        while sid is not None:
            scope = self.scopes[sid]
            if name in scope.entries:
                return sid, scope.entries[name]
            sid = scope.parent
        return None

    def lookup(self, name: str) -> DictEntry:
        found = self.resolve(name)
        if found is None:
            raise UndefinedIdentifier(f"undefined identifier {name!r}")
        return found[1]

    def __contains__(self, name) -> bool:
        return self.resolve(name) is not None

    def local(self, name: str) -> DictEntry | None:
        return self.scopes[self.current].entries.get(name)

    def global_entries(self) -> dict:
        return dict(self.scopes["global"].entries)

    def rows(self) -> list[tuple[str, str, str, str]]:
        """Canonical (scope, name, kind, detail) listing, sorted."""
        out = []
        for sid, scope in self.scopes.items():
            for name, e in scope.entries.items():
                out.append((sid, name, e.kind, e.detail()))
        out.sort()
        return out

    def __eq__(self, other):
        return isinstance(other, Dictionary) and self.rows() == other.rows()

    def __repr__(self):
        return f"Dictionary({len(self.scopes)} scopes, current={self.current!r})"
