"""Intensional programming toolchain for the Lucid family of languages."""

from .compiler import compile_file, compile_source, parse_source
from .eduction import Engine, run
from .semantics.geer import deserialize, serialize

__version__ = "0.1.0"

__all__ = ["Engine", "compile_file", "compile_source", "deserialize", "parse_source",
           "run", "serialize"]
