"""Recursive-descent parser for the circuit DSL subset."""

from __future__ import annotations

from . import ast as A
from .lexer import Diagnostic, ParseError, Token, tokenize

# Binary precedence levels, loosest first. ``**`` is handled separately
# because it is right-associative and binds tighter than unary minus.
_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "\\", "%"),
]

_ASSIGN_OPS = {"=", "<--", "<=="}
_COMPOUND_OPS = {"+=", "-=", "*=", "/=", "\\=", "%=", "**=", "<<=", ">>=", "&=", "|=", "^="}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError([Diagnostic(tok.span, message)])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected '{text}', found '{found}'")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found '{self.tok.text or 'end of input'}'")
        return self.advance()

    # -- top level ---------------------------------------------------------

    def program(self, require_main: bool = True) -> A.SourceProgram:
        templates, includes, main = [], [], None
        while self.tok.kind != "eof":
            if self.at("pragma"):
                while not self.at(";") and self.tok.kind != "eof":
                    self.advance()
                self.expect(";")
            elif self.at("include"):
                self.advance()
                if self.tok.kind != "string":
                    self.error("expected file name string after 'include'")
                includes.append(self.advance().text[1:-1])
                self.expect(";")
            elif self.at("template"):
                templates.append(self.template())
            elif self.at("component") and self.peek().text == "main":
                if main is not None:
                    self.error("duplicate main component")
                main = self.main()
            else:
                self.error(f"unexpected '{self.tok.text}' at top level")
        if main is None and require_main:
            raise ParseError([Diagnostic(self.tok.span, "missing 'component main = ...;'")])
        return A.SourceProgram(templates, main, includes)

    def template(self) -> A.TemplateDecl:
        start = self.expect("template")
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.ident().text)
            while self.at(","):
                self.advance()
                params.append(self.ident().text)
        self.expect(")")
        body = self.block().stmts
        return A.TemplateDecl(name, params, body, start.span)

    def main(self) -> A.MainComponent:
        start = self.expect("component")
        self.expect("main")
        public = []
        if self.at("{"):
            self.advance()
            self.expect("public")
            self.expect("[")
            if not self.at("]"):
                public.append(self.ident().text)
                while self.at(","):
                    self.advance()
                    public.append(self.ident().text)
            self.expect("]")
            self.expect("}")
        self.expect("=")
        name = self.ident().text
        args = self.call_args()
        self.expect(";")
        return A.MainComponent(name, args, public, start.span)

    # -- statements --------------------------------------------------------

    def block(self) -> A.Block:
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            s = self.statement()
            if s is not None:
                stmts.append(s)
        self.expect("}")
        return A.Block(stmts, start.span)

    def statement(self):
        t = self.tok
        if self.at("{"):
            return self.block()
        if self.at("signal"):
            s = self.signal_decl()
        elif self.at("var"):
            s = self.var_decl()
        elif self.at("component"):
            s = self.component_decl()
        elif self.at("for"):
            return self.for_stmt()
        elif self.at("if"):
            return self.if_stmt()
        elif self.at("assert"):
            self.advance()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            s = A.Assert(e, t.span)
        elif self.at("log"):
            self.advance()
            self.expect("(")
            depth = 1
            while depth:
                if self.tok.kind == "eof":
                    self.error("unterminated log(...)")
                if self.at("("):
                    depth += 1
                elif self.at(")"):
                    depth -= 1
                self.advance()
            self.expect(";")
            return None
        elif self.at(";"):
            self.advance()
            return None
        else:
            s = self.simple()
        self.expect(";")
        return s

    def dims(self) -> list:
        dims = []
        while self.at("["):
            self.advance()
            dims.append(self.expr())
            self.expect("]")
        return dims

    def signal_decl(self) -> A.SignalDecl:
        start = self.expect("signal")
        role = None
        if self.at("input", "output"):
            role = self.advance().text
        items = [self.decl_item()]
        while self.at(","):
            self.advance()
            items.append(self.decl_item())
        op = value = None
        if self.at("<==", "<--"):
            op = self.advance().text
            if len(items) != 1:
                self.error("an assigning signal declaration must declare exactly one signal")
            value = self.expr()
        return A.SignalDecl(role, items, op, value, start.span)

    def decl_item(self, allow_init: bool = False) -> A.DeclItem:
        t = self.ident()
        dims = self.dims()
        init = None
        if allow_init and self.at("="):
            self.advance()
            init = self.expr()
        return A.DeclItem(t.text, dims, init, t.span)

    def var_decl(self) -> A.VarDecl:
        start = self.expect("var")
        items = [self.decl_item(allow_init=True)]
        while self.at(","):
            self.advance()
            items.append(self.decl_item(allow_init=True))
        return A.VarDecl(items, start.span)

    def component_decl(self) -> A.ComponentDecl:
        start = self.expect("component")
        name = self.ident().text
        dims = self.dims()
        value = None
        if self.at("="):
            self.advance()
            value = self.expr()
        return A.ComponentDecl(name, dims, value, start.span)

    def for_stmt(self) -> A.For:
        start = self.expect("for")
        self.expect("(")
        init = None
        if self.at("var"):
            init = self.var_decl()
        elif not self.at(";"):
            init = self.simple()
        self.expect(";")
        cond = self.expr()
        self.expect(";")
        step = None if self.at(")") else self.simple()
        self.expect(")")
        body = self.statement()
        if body is None:
            body = A.Block([], start.span)
        return A.For(init, cond, step, body, start.span)

    def if_stmt(self) -> A.If:
        start = self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.statement() or A.Block([], start.span)
        other = None
        if self.at("else"):
            self.advance()
            other = self.statement() or A.Block([], start.span)
        return A.If(cond, then, other, start.span)

    def simple(self):
        start = self.tok
        lhs = self.expr()
        op_tok = self.tok
        if self.at("==="):
            self.advance()
            return A.ConstraintEq(lhs, self.expr(), start.span)
        if self.at("-->", "==>"):
            self.advance()
            target = self.expr()
            self._check_lvalue(target, op_tok)
            return A.Assign(target, "<--" if op_tok.text == "-->" else "<==", lhs, start.span)
        if self.at(*_ASSIGN_OPS) or self.at(*_COMPOUND_OPS):
            self._check_lvalue(lhs, start)
            self.advance()
            return A.Assign(lhs, op_tok.text, self.expr(), start.span)
        if self.at("++", "--"):
            self._check_lvalue(lhs, start)
            self.advance()
            return A.Assign(lhs, op_tok.text, None, start.span)
        found = op_tok.text or "end of input"
        self.error(f"expected an assignment or constraint operator, found '{found}'")

    def _check_lvalue(self, e, tok: Token):
        node = e
        while isinstance(node, (A.Index, A.Member)):
            node = node.base
        if not isinstance(node, A.Name):
            self.error("invalid assignment target", tok)

    # -- expressions -------------------------------------------------------

    def expr(self):
        cond = self.binary(0)
        if self.at("?"):
            t = self.advance()
            then = self.expr()
            self.expect(":")
            other = self.expr()
            return A.Ternary(cond, then, other, t.span)
        return cond

    def binary(self, level: int):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            t = self.advance()
            right = self.binary(level + 1)
            left = A.BinOp(t.text, left, right, t.span)
        return left

    def unary(self):
        if self.at("-", "!", "~", "+"):
            t = self.advance()
            operand = self.unary()
            if t.text == "+":
                return operand
            return A.Unary(t.text, operand, t.span)
        return self.power()

    def power(self):
        base = self.postfix()
        if self.at("**"):
            t = self.advance()
            return A.BinOp("**", base, self.unary(), t.span)
        return base

    def call_args(self) -> list:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.at(","):
                self.advance()
                args.append(self.expr())
        self.expect(")")
        return args

    def postfix(self):
        node = self.primary()
        while True:
            if self.at("["):
                t = self.advance()
                idx = self.expr()
                self.expect("]")
                node = A.Index(node, idx, t.span)
            elif self.at("."):
                self.advance()
                name = self.ident()
                node = A.Member(node, name.text, name.span)
            elif self.at("(") and isinstance(node, A.Name):
                args = self.call_args()
                node = A.Call(node.name, args, node.span)
                if self.at("("):
                    node = A.AnonCall(node.template, node.args, self.call_args(), node.span)
            else:
                return node

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return A.Number(int(t.text, 0), t.span)
        if t.kind == "ident":
            self.advance()
            return A.Name(t.text, t.span)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("["):
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
            self.expect("]")
            return A.ArrayLit(items, t.span)
        self.error(f"expected expression, found '{t.text or 'end of input'}'")


def _declared_names(stmts) -> set[str]:
    names = set()
    stack = list(stmts)
    while stack:
        s = stack.pop()
        if isinstance(s, A.SignalDecl) or isinstance(s, A.VarDecl):
            names.update(i.name for i in s.items)
        elif isinstance(s, A.ComponentDecl):
            names.add(s.name)
        elif isinstance(s, A.Block):
            stack.extend(s.stmts)
        elif isinstance(s, A.For):
            stack.extend(x for x in (s.init, s.step, s.body) if x is not None)
        elif isinstance(s, A.If):
            stack.extend(x for x in (s.then, s.other) if x is not None)
    return names


def _input_count(t: A.TemplateDecl) -> int:
    count = 0
    stack = list(t.body)
    while stack:
        s = stack.pop()
        if isinstance(s, A.SignalDecl) and s.role == "input":
            count += len(s.items)
        elif isinstance(s, A.Block):
            stack.extend(s.stmts)
        elif isinstance(s, A.For):
            stack.append(s.body)
        elif isinstance(s, A.If):
            stack.extend(x for x in (s.then, s.other) if x is not None)
    return count


def validate(program: A.SourceProgram) -> list[Diagnostic]:
    """Static checks: duplicate templates, unknown names, call arity."""
    diags = []
    by_name = {}
    for t in program.templates:
        if t.name in by_name:
            diags.append(Diagnostic(t.span, f"duplicate template '{t.name}'"))
        else:
            by_name[t.name] = t

    def check_call(name, nargs, span, ninputs=None):
        t = by_name.get(name)
        if t is None:
            diags.append(Diagnostic(span, f"unknown template '{name}'"))
            return
        if len(t.params) != nargs:
            diags.append(Diagnostic(span, f"template '{name}' expects {len(t.params)} parameter(s), got {nargs}"))
        if ninputs is not None and _input_count(t) != ninputs:
            diags.append(Diagnostic(span, f"template '{name}' has {_input_count(t)} input signal(s), got {ninputs}"))

    m = program.main
    check_call(m.template, len(m.args), m.span)
    for t in by_name.values():
        known = set(t.params) | _declared_names(t.body)
        for e in A.walk_exprs(t.body):
            if isinstance(e, A.Name) and e.name not in known:
                diags.append(Diagnostic(e.span, f"unknown identifier '{e.name}'"))
            elif isinstance(e, A.AnonCall):
                check_call(e.template, len(e.args), e.span, len(e.inputs))
            elif isinstance(e, A.Call):
                check_call(e.template, len(e.args), e.span)
    diags.sort(key=lambda d: (d.span.line, d.span.col))
    return diags


def parse(source_text: str) -> A.SourceProgram:
    """Parse source text into a ``SourceProgram``.

    Raises ``ParseError`` carrying positioned diagnostics on syntax errors,
    unknown identifiers, duplicate templates and arity mismatches.
    """
    program = _Parser(tokenize(source_text)).program()
    diags = validate(program)
    if diags:
        raise ParseError(diags)
    return program
