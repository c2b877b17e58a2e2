"""Circuit DSL front end: tokenizer, parser, printer and file loader."""

from __future__ import annotations

from pathlib import Path

from . import ast
from .lexer import Diagnostic, ParseError
from .parser import _Parser, parse, validate
from .printer import expr_to_str, pretty_print
from .lexer import tokenize

__all__ = [
    "ast", "Diagnostic", "ParseError", "parse", "pretty_print", "expr_to_str",
    "load_program",
]


def load_program(path: str | Path) -> ast.SourceProgram:
    """Parse a source file, pulling in templates from relative includes."""
    path = Path(path)
    root = _Parser(tokenize(path.read_text(encoding="utf-8"))).program()
    seen = {path.resolve()}
    pending = [(path.parent, inc) for inc in root.includes]
    templates = list(root.templates)
    while pending:
        base, inc = pending.pop(0)
        target = (base / inc).resolve()
        if target in seen:
            continue
        seen.add(target)
        if not target.exists():
            raise ParseError([Diagnostic(root.main.span, f"included file not found: {inc}")])
        text = target.read_text(encoding="utf-8")
        sub = _Parser(tokenize(text)).program(require_main=False)
        templates.extend(sub.templates)
        pending.extend((target.parent, i) for i in sub.includes)
    program = ast.SourceProgram(templates, root.main, root.includes)
    diags = validate(program)
    if diags:
        raise ParseError(diags)
    return program
