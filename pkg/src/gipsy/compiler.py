"""The compile pipeline: segments -> ASTs -> translation -> analysis -> link."""

from __future__ import annotations

import os

from .core.dictionary import DictEntry
from .core.errors import CompileError, Unsupported, UnsupportedLanguage
from .frontend.parser import parse
from .frontend.segments import (DIALECT_LANG, INTENSIONAL, NATIVE, OPAQUE_HOST,
                                build_stub_dictionary, parse_segments)
from .host.builtins import standard_registry
from .host.native import load_native
from .host.registry import HostRegistry
from .semantics.analyze import annotate, called_names
from .semantics.link import EductionProgram, link, prototype_from_host
from .translator import RewriteEnv, dialect_operators, flatten_blocks
from .translator import translate as translate_ast


def add_host_stubs(stubs, asts, registry: HostRegistry):
    """FreeFun/Class stubs for registry names used without a declaration."""
    wanted = set()
    for ast in asts:
        wanted |= called_names(ast)
    for name in sorted(wanted):
        if name in stubs:
            continue
        if name in registry.records:
            stubs = stubs.extend(name, DictEntry("Class", (name, None)))
        elif name in registry.functions:
            proto = prototype_from_host(registry.functions[name], registry.records)
            stubs = stubs.extend(name, DictEntry("FreeFun", (proto, None)))
    return stubs


def parse_source(text: str, dialect: str | None = None) -> list[tuple[str, object]]:
    """Parse every intensional segment; no translation, analysis or linking."""
    default_lang = DIALECT_LANG[dialect] if dialect else None
    prog = parse_segments(text, default_lang)
    return [(INTENSIONAL[s.lang_id], parse(s.body, INTENSIONAL[s.lang_id], s.start_line))
            for s in prog.segments if s.lang_id in INTENSIONAL]


def compile_source(text: str, *, dialect: str | None = None, translate: bool | None = None,
                   filename: str = "<input>", registry: HostRegistry | None = None,
                   warnings_as_errors: bool = False, base_dir: str | None = None,
                   cpkind: str = "Null") -> EductionProgram:
    """Compile a (possibly segmented) source into a linked program.

    ``translate`` None means: rewrite stream operators for every non-GIPL
    segment. False leaves the tree alone and rejects leftover operators.
    """
    if base_dir is None and filename not in ("<input>", "<stdin>"):
        base_dir = os.path.dirname(os.path.abspath(filename))
    default_lang = DIALECT_LANG[dialect] if dialect else None
    prog = parse_segments(text, default_lang)
    reg = (registry or standard_registry()).derive()
    warnings, asts, natives = [], [], []
    for seg in prog.segments:
        if seg.lang_id in INTENSIONAL:
            lang = INTENSIONAL[seg.lang_id]
            asts.append((lang, parse(seg.body, lang, seg.start_line)))
        elif seg.lang_id == NATIVE:
            load_native(reg, seg.body, seg.start_line, filename)
            natives.append((seg.body, seg.start_line))
        elif seg.lang_id in OPAQUE_HOST:
            warnings.append(f"{filename}:{seg.start_line - 1}:1: warning: #{seg.lang_id} "
                            "segment is not executable in this build; its names bind to "
                            "the host registry")
        else:
            raise UnsupportedLanguage(f"no compiler for segment #{seg.lang_id}",
                                      (seg.start_line - 1, 1))
    if warnings and warnings_as_errors:
        raise CompileError("Warning", warnings[0])

    env = RewriteEnv()
    trees = []
    for lang, ast in asts:
        ast = flatten_blocks(ast)
        if translate is None and lang != "gipl" or translate:
            ast = translate_ast(ast, env)
        else:
            left = dialect_operators(ast)
            if left:
                raise Unsupported(f"operator {left[0].op!r} left untranslated", left[0].pos)
        trees.append(ast)

    stubs = add_host_stubs(build_stub_dictionary(prog), trees, reg)
    d, annotations = stubs, {}
    for i, ast in enumerate(trees):
        d, ann = annotate(ast, d, prefix=f"a{i}." if len(trees) > 1 else "")
        annotations.update(ann)
    linked = link(prog, trees, reg, d, base_dir, cpkind)
    linked.natives = natives
    linked.annotations = annotations
    linked.warnings = warnings
    return linked


def compile_file(path: str, **kw) -> EductionProgram:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return compile_source(text, filename=path, **kw)
