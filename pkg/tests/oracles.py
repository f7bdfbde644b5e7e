"""Reference implementations the toolchain is checked against.

Nothing here imports the package: streams are plain Python functions of the
tag, expanded recursively with no caching.
"""

from __future__ import annotations

import random
import sys


class Reject(Exception):
    """The naive expansion blew its budget (divergent or too expensive)."""


class NaiveStreams:
    """Single-dimension stream semantics by direct recursive expansion.

    Expressions are tuples:
        ("lit", n) ("hash",) ("var", name)
        ("first", e) ("next", e) ("prev", e)
        ("fby", a, b) ("wvr", a, p) ("asa", a, p) ("upon", a, p)
        ("+", a, b) ("-", a, b)
        (">", e, k) ("<", e, k) ("==", e, k)      # predicates, Bool-valued
    """

    def __init__(self, defs: dict, budget: int = 200_000, max_depth: int = 1500):
        self.defs = defs
        self.budget = budget
        self.max_depth = max_depth
        self.steps = 0
        self.depth = 0

    def at(self, e, t):
        self.steps += 1
        if self.steps > self.budget or self.depth > self.max_depth:
            raise Reject()
        self.depth += 1
        try:
            return self._at(e, t)
        finally:
            self.depth -= 1

    def _at(self, e, t):
        op = e[0]
        if op == "lit":
            return e[1]
        if op == "hash":
            return t
        if op == "var":
            return self.at(self.defs[e[1]], t)
        if op == "first":
            return self.at(e[1], 0)
        if op == "next":
            return self.at(e[1], t + 1)
        if op == "prev":
            return self.at(e[1], t - 1)
        if op == "fby":
            return self.at(e[1], t) if t <= 0 else self.at(e[2], t - 1)
        if op == "wvr":
            return self.at(e[1], self._wvr_t(e[2], t))
        if op == "asa":
            return self.at(e[1], self._wvr_t(e[2], 0))
        if op == "upon":
            return self.at(e[1], self._upon_w(e[2], t))
        if op == "+":
            return self.at(e[1], t) + self.at(e[2], t)
        if op == "-":
            return self.at(e[1], t) - self.at(e[2], t)
        if op == ">":
            return self.at(e[1], t) > e[2]
        if op == "<":
            return self.at(e[1], t) < e[2]
        if op == "==":
            return self.at(e[1], t) == e[2]
        raise ValueError(op)

    # U = if Y then # else next U
    def _wvr_u(self, p, t):
        while True:
            self.steps += 1
            if self.steps > self.budget:
                raise Reject()
            if self.at(p, t):
                return t
            t += 1

    # T = U fby U @ (T + 1)
    def _wvr_t(self, p, t):
        if t <= 0:
            return self._wvr_u(p, t)
        return self._wvr_u(p, self._wvr_t(p, t - 1) + 1)

    # W = 0 fby (if Y then W + 1 else W)
    def _upon_w(self, p, t):
        if t <= 0:
            return 0
        w = self._upon_w(p, t - 1)
        return w + 1 if self.at(p, t - 1) else w


def to_lucid(e, dim: str = "d") -> str:
    op = e[0]
    if op == "lit":
        return str(e[1])
    if op == "hash":
        return f"#.{dim}"
    if op == "var":
        return e[1]
    if op in ("first", "next", "prev"):
        return f"{op}.{dim} ({to_lucid(e[1], dim)})"
    if op in ("fby", "wvr", "asa", "upon"):
        return f"({to_lucid(e[1], dim)}) {op}.{dim} ({to_lucid(e[2], dim)})"
    if op in ("+", "-"):
        return f"({to_lucid(e[1], dim)}) {op} ({to_lucid(e[2], dim)})"
    if op in (">", "<", "=="):
        return f"({to_lucid(e[1], dim)}) {op} {e[2]}"
    raise ValueError(op)


class ProgramGenerator:
    """Random single-dimension programs: one result expression, up to two variables."""

    UNARY = ("first", "next", "prev")
    STREAM = ("fby", "wvr", "asa", "upon")

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def pred(self, depth, names):
        op = self.rng.choice([">", "<", "=="])
        return (op, self.expr(depth - 1, names), self.rng.randint(0, 6))

    def expr(self, depth, names):
        r = self.rng
        if depth <= 0 or r.random() < 0.25:
            leaf = r.random()
            if names and leaf < 0.35:
                return ("var", r.choice(names))
            if leaf < 0.6:
                return ("hash",)
            return ("lit", r.randint(0, 5))
        kind = r.random()
        if kind < 0.25:
            return (r.choice(self.UNARY), self.expr(depth - 1, names))
        if kind < 0.5:
            return (r.choice("+-"), self.expr(depth - 1, names), self.expr(depth - 1, names))
        if kind < 0.7:
            return ("fby", self.expr(depth - 1, names), self.expr(depth - 1, names))
        op = r.choice(("wvr", "asa", "upon"))
        return (op, self.expr(depth - 1, names), self.pred(depth - 1, names))

    def program(self):
        names = [f"V{i}" for i in range(self.rng.randint(0, 2))]
        defs = {}
        for n in names:
            # guarded recursion keeps most definitions productive
            defs[n] = ("fby", ("lit", self.rng.randint(0, 5)), self.expr(2, names))
        return self.expr(3, names), defs


def program_text(result, defs, tags, dim: str = "d") -> str:
    """A program whose value is the array of ``result`` at each tag."""
    items = ", ".join(f"R @.{dim} {t}" for t in tags)
    lines = [f"[{items}]", "where", f"    dimension {dim};", f"    R = {to_lucid(result, dim)};"]
    lines += [f"    {n} = {to_lucid(e, dim)};" for n, e in defs.items()]
    lines.append("end;")
    return "\n".join(lines) + "\n"


def oracle_values(result, defs, tags, budget: int = 200_000):
    """Values at ``tags`` or raise Reject."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20_000))
    try:
        ns = NaiveStreams(defs, budget)
        return [ns.at(result, t) for t in tags]
    except RecursionError:
        raise Reject() from None
    finally:
        sys.setrecursionlimit(old)


def hamming(n: int) -> list[int]:
    """First ``n`` numbers of the form 2^a 3^b 5^c by brute-force enumeration."""
    limit = 2
    while True:
        found = sorted({2 ** a * 3 ** b * 5 ** c
                        for a in range(limit) for b in range(limit) for c in range(limit)})
        bound = min(2 ** limit, 3 ** limit, 5 ** limit)
        small = [x for x in found if x < bound]
        if len(small) >= n:
            return small[:n]
        limit += 1
