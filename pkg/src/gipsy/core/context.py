"""Evaluation contexts: finite maps from dimension names to integer tags."""

from __future__ import annotations

from .errors import TagOverflow, UnboundDimension
from .values import INT_MAX, INT_MIN


class Context:
    """Immutable dimension -> tag map. Hash and equality ignore binding order."""

    __slots__ = ("_map", "_key")

    def __init__(self, bindings=None):
        m = dict(bindings or {})
        for dim, tag in m.items():
            _check_tag(tag)
        self._map = m
        self._key = tuple(sorted(m.items()))

    @classmethod
    def _raw(cls, m: dict) -> "Context":
        c = cls.__new__(cls)
        c._map = m
        c._key = tuple(sorted(m.items()))
        return c

    @property
    def key(self) -> tuple:
        """Canonical sorted (dimension, tag) tuple."""
        return self._key

    def override(self, dim: str, tag: int) -> "Context":
        _check_tag(tag)
        if self._map.get(dim) == tag and dim in self._map:
            return self
        m = dict(self._map)
        m[dim] = tag
        return Context._raw(m)

    def query(self, dim: str) -> int:
        try:
            return self._map[dim]
        except KeyError:
            raise UnboundDimension(f"dimension {dim!r} is not bound") from None

    def __contains__(self, dim) -> bool:
        return dim in self._map

    def items(self):
        return self._key

    def as_dict(self) -> dict:
        return dict(self._map)

    def __eq__(self, other):
        return isinstance(other, Context) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        inner = ", ".join(f"{d}:{t}" for d, t in self._key)
        return "{" + inner + "}"


EMPTY = Context()


def _check_tag(tag):
    if isinstance(tag, bool) or not isinstance(tag, int):
        raise TypeError(f"tag must be an integer, got {tag!r}")
    if not INT_MIN <= tag <= INT_MAX:
        raise TagOverflow(f"tag {tag} overflows 64 bits")


def context_override(p: Context, dim: str, tag: int) -> Context:
    return p.override(dim, tag)


def context_query(p: Context, dim: str) -> int:
    return p.query(dim)
