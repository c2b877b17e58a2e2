"""Render a syntax tree back to DSL source text."""

from __future__ import annotations

from . import ast as A

_ATOMS = (A.Number, A.Name, A.Index, A.Member, A.Call, A.AnonCall, A.ArrayLit)


def expr_to_str(e) -> str:
    if isinstance(e, A.Number):
        return str(e.value)
    if isinstance(e, A.Name):
        return e.name
    if isinstance(e, A.Index):
        return f"{_wrap(e.base)}[{expr_to_str(e.index)}]"
    if isinstance(e, A.Member):
        return f"{_wrap(e.base)}.{e.name}"
    if isinstance(e, A.Unary):
        return f"{e.op}{_wrap(e.operand)}"
    if isinstance(e, A.BinOp):
        return f"{_wrap(e.left)} {e.op} {_wrap(e.right)}"
    if isinstance(e, A.Ternary):
        return f"{_wrap(e.cond)} ? {_wrap(e.then)} : {_wrap(e.other)}"
    if isinstance(e, A.ArrayLit):
        return "[" + ", ".join(expr_to_str(i) for i in e.items) + "]"
    if isinstance(e, A.Call):
        return f"{e.template}({_args(e.args)})"
    if isinstance(e, A.AnonCall):
        return f"{e.template}({_args(e.args)})({_args(e.inputs)})"
    raise TypeError(f"not an expression: {e!r}")


def _args(items) -> str:
    return ", ".join(expr_to_str(a) for a in items)


def _wrap(e) -> str:
    s = expr_to_str(e)
    return s if isinstance(e, _ATOMS) else f"({s})"


def _dims(dims) -> str:
    return "".join(f"[{expr_to_str(d)}]" for d in dims)


def _simple(s) -> str:
    """A statement without its trailing semicolon."""
    if isinstance(s, A.SignalDecl):
        role = f" {s.role}" if s.role else ""
        items = ", ".join(i.name + _dims(i.dims) for i in s.items)
        tail = f" {s.op} {expr_to_str(s.value)}" if s.op else ""
        return f"signal{role} {items}{tail}"
    if isinstance(s, A.VarDecl):
        parts = []
        for i in s.items:
            init = f" = {expr_to_str(i.init)}" if i.init is not None else ""
            parts.append(i.name + _dims(i.dims) + init)
        return "var " + ", ".join(parts)
    if isinstance(s, A.ComponentDecl):
        tail = f" = {expr_to_str(s.value)}" if s.value is not None else ""
        return f"component {s.name}{_dims(s.dims)}{tail}"
    if isinstance(s, A.Assign):
        if s.value is None:
            return f"{expr_to_str(s.target)}{s.op}"
        return f"{expr_to_str(s.target)} {s.op} {expr_to_str(s.value)}"
    if isinstance(s, A.ConstraintEq):
        return f"{expr_to_str(s.left)} === {expr_to_str(s.right)}"
    if isinstance(s, A.Assert):
        return f"assert({expr_to_str(s.expr)})"
    raise TypeError(f"not a simple statement: {s!r}")


def _stmt(s, indent: int) -> list[str]:
    pad = "    " * indent
    if isinstance(s, A.Block):
        lines = [pad + "{"]
        for inner in s.stmts:
            lines.extend(_stmt(inner, indent + 1))
        return lines + [pad + "}"]
    if isinstance(s, A.For):
        init = _simple(s.init) if s.init is not None else ""
        step = _simple(s.step) if s.step is not None else ""
        head = f"{pad}for ({init}; {expr_to_str(s.cond)}; {step})"
        return [head] + _stmt(s.body, indent + 1)
    if isinstance(s, A.If):
        lines = [f"{pad}if ({expr_to_str(s.cond)})"] + _stmt(s.then, indent + 1)
        if s.other is not None:
            lines += [pad + "else"] + _stmt(s.other, indent + 1)
        return lines
    return [pad + _simple(s) + ";"]


def pretty_print(program: A.SourceProgram) -> str:
    lines = [f'include "{inc}";' for inc in program.includes]
    for t in program.templates:
        lines.append(f"template {t.name}({', '.join(t.params)}) {{")
        for s in t.body:
            lines.extend(_stmt(s, 1))
        lines.append("}")
        lines.append("")
    m = program.main
    public = f" {{public [{', '.join(m.public)}]}}" if m.public else ""
    lines.append(f"component main{public} = {m.template}({_args(m.args)});")
    return "\n".join(lines) + "\n"
