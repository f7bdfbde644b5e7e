"""Format tags: meta-information attached to host functions and transports."""

from __future__ import annotations

import platform
import sys

REQUIRED = ("language", "os", "compiler", "version")


class FormatTag:
    __slots__ = ("specs",)

    def __init__(self, **specs: str):
        missing = [k for k in REQUIRED if k not in specs]
        if missing:
            raise ValueError(f"format tag lacks {', '.join(missing)}")
        self.specs = {k: str(v) for k, v in specs.items()}

    def render(self) -> str:
        return ";".join(f"{k}={self.specs[k]}" for k in sorted(self.specs))

    def __eq__(self, other):
        return isinstance(other, FormatTag) and self.render() == other.render()

    def __hash__(self):
        return hash(self.render())

    def __str__(self):
        return self.render()

    __repr__ = __str__


def native_tag() -> FormatTag:
    return FormatTag(language="native", os=platform.system() or "unknown",
                     compiler=sys.implementation.name,
                     version=".".join(map(str, sys.version_info[:3])))
