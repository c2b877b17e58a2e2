"""Syntax tree for the circuit DSL.

Every node carries a ``span`` for diagnostics. Spans are excluded from
equality so that trees parsed from differently formatted text compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int = 0
    col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}"


NO_SPAN = Span()


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


# -- expressions ------------------------------------------------------------

@dataclass
class Number:
    value: int
    span: Span = _span()


@dataclass
class Name:
    name: str
    span: Span = _span()


@dataclass
class Index:
    base: "Expr"
    index: "Expr"
    span: Span = _span()


@dataclass
class Member:
    base: "Expr"
    name: str
    span: Span = _span()


@dataclass
class Unary:
    op: str
    operand: "Expr"
    span: Span = _span()


@dataclass
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = _span()


@dataclass
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    span: Span = _span()


@dataclass
class ArrayLit:
    items: list
    span: Span = _span()


@dataclass
class Call:
    """Template instantiation ``Foo(params)``."""

    template: str
    args: list
    span: Span = _span()


@dataclass
class AnonCall:
    """Call-style component ``Foo(params)(inputs)``."""

    template: str
    args: list
    inputs: list
    span: Span = _span()


Expr = Union[Number, Name, Index, Member, Unary, BinOp, Ternary, ArrayLit, Call, AnonCall]


# -- statements -------------------------------------------------------------

@dataclass
class DeclItem:
    name: str
    dims: list
    init: Optional["Expr"] = None
    span: Span = _span()


@dataclass
class SignalDecl:
    role: Optional[str]  # "input", "output" or None for intermediates
    items: list
    op: Optional[str] = None  # "<==" or "<--" when the declaration assigns
    value: Optional["Expr"] = None
    span: Span = _span()


@dataclass
class VarDecl:
    items: list
    span: Span = _span()


@dataclass
class ComponentDecl:
    name: str
    dims: list
    value: Optional["Expr"] = None
    span: Span = _span()


@dataclass
class Assign:
    """``target op value`` for =, <--, <==, compound ops and ++/--."""

    target: "Expr"
    op: str
    value: Optional["Expr"]
    span: Span = _span()


@dataclass
class ConstraintEq:
    left: "Expr"
    right: "Expr"
    span: Span = _span()


@dataclass
class Assert:
    expr: "Expr"
    span: Span = _span()


@dataclass
class Block:
    stmts: list
    span: Span = _span()


@dataclass
class For:
    init: Optional["Stmt"]
    cond: "Expr"
    step: Optional["Stmt"]
    body: "Stmt"
    span: Span = _span()


@dataclass
class If:
    cond: "Expr"
    then: "Stmt"
    other: Optional["Stmt"] = None
    span: Span = _span()


Stmt = Union[SignalDecl, VarDecl, ComponentDecl, Assign, ConstraintEq, Assert, Block, For, If]


@dataclass
class TemplateDecl:
    name: str
    params: list
    body: list
    span: Span = _span()


@dataclass
class MainComponent:
    template: str
    args: list
    public: list = field(default_factory=list)
    span: Span = _span()


@dataclass
class SourceProgram:
    templates: list
    main: MainComponent
    includes: list = field(default_factory=list)

    def template(self, name: str) -> TemplateDecl:
        for t in self.templates:
            if t.name == name:
                return t
        raise KeyError(name)


def walk_exprs(node):
    """Yield every expression node below ``node`` (statements included)."""
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, list):
            stack.extend(reversed(n))
            continue
        if n is None or isinstance(n, (str, int, Span)):
            continue
        if isinstance(n, (Number, Name, Index, Member, Unary, BinOp, Ternary, ArrayLit, Call, AnonCall)):
            yield n
        for f in getattr(n, "__dataclass_fields__", {}):
            if f != "span":
                stack.append(getattr(n, f))
