"""Tokenizer for the circuit DSL."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import Span

KEYWORDS = {
    "template", "signal", "input", "output", "var", "component", "for", "if",
    "else", "assert", "main", "public", "pragma", "include", "log",
}

# Longest operators first so the alternation prefers them.
OPERATORS = [
    "<==", "==>", "<--", "-->", "===", "**=", "<<=", ">>=", "\\=",
    "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "**",
    "+", "-", "*", "/", "\\", "%", "<", ">", "!", "~", "&", "|", "^", "?", ":",
    "=", "(", ")", "[", "]", "{", "}", ",", ";", ".",
]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<nl>\n)"
    r"|(?P<comment>//[^\n]*)"
    r"|(?P<block>/\*.*?\*/)"
    r"|(?P<num>0[xX][0-9a-fA-F]+|\d+)"
    r"|(?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)"
    r"|(?P<string>\"[^\"\n]*\")"
    r"|(?P<op>" + "|".join(re.escape(o) for o in OPERATORS) + r")",
    re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "kw", "op", "string", "eof"
    text: str
    span: Span


class Diagnostic(Exception):
    def __init__(self, span: Span, message: str):
        super().__init__(message)
        self.span = span
        self.message = message

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.span.line}:{self.span.col}: {self.message}"


class ParseError(Exception):
    """One or more diagnostics produced while reading source text."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(f"{d.span}: {d.message}" for d in diagnostics))

    def format(self, filename: str = "<input>") -> str:
        return "\n".join(d.format(filename) for d in self.diagnostics)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError([Diagnostic(Span(line, pos - line_start + 1), f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        span = Span(line, pos - line_start + 1)
        chunk = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "block":
            nls = chunk.count("\n")
            if nls:
                line += nls
                line_start = pos + chunk.rfind("\n") + 1
        elif kind in ("ws", "comment"):
            pass
        elif kind == "ident":
            tokens.append(Token("kw" if chunk in KEYWORDS else "ident", chunk, span))
        else:
            tokens.append(Token(kind, chunk, span))
        pos = m.end()
    tokens.append(Token("eof", "", Span(line, pos - line_start + 1)))
    return tokens
