"""Lowered representation: expression trees over slots, instructions and
sparse quadratic polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .field import ArithmeticAbort, PrimeField
from .frontend.ast import NO_SPAN, Span

ARITHMETIC_OPS = ("+", "-", "*", "/", "\\", "%")
BITWISE_OPS = ("<<", ">>", "&", "|", "^")
LOGICAL_OPS = ("==", "!=", "<", "<=", ">", ">=", "&&", "||")
OP_CATEGORIES = (ARITHMETIC_OPS, BITWISE_OPS, LOGICAL_OPS)


def op_category(op: str) -> tuple | None:
    for cat in OP_CATEGORIES:
        if op in cat:
            return cat
    return None


# -- expressions --------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Slot:
    index: int


@dataclass(frozen=True)
class Unary:
    op: str  # "-", "!", "~"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


@dataclass(frozen=True)
class Select:
    """Runtime subscript: ``items[index]``, aborting when out of range."""

    items: tuple
    index: "Expr"


Expr = Union[Const, Slot, Unary, Binary, Ternary, Select]


def apply_binary(field: PrimeField, op: str, a: int, b: int) -> int:
    """Evaluate ``a op b`` on canonical residues. Raises ArithmeticAbort."""
    if op == "+":
        return field.add(a, b)
    if op == "-":
        return field.sub(a, b)
    if op == "*":
        return field.mul(a, b)
    if op == "/":
        return field.div(a, b)
    if op == "\\":
        return field.int_div(a, b)
    if op == "%":
        return field.int_mod(a, b)
    if op == "**":
        return field.pow(a, b)
    if op == "<<":
        return field.shl(a, b)
    if op == ">>":
        return field.shr(a, b)
    if op == "&":
        return field.bit_and(a, b)
    if op == "|":
        return field.bit_or(a, b)
    if op == "^":
        return field.bit_xor(a, b)
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "<":
        return field.lt(a, b)
    if op == "<=":
        return field.le(a, b)
    if op == ">":
        return field.gt(a, b)
    if op == ">=":
        return field.ge(a, b)
    if op == "&&":
        return int(bool(a) and bool(b))
    if op == "||":
        return int(bool(a) or bool(b))
    raise ValueError(f"unknown operator {op!r}")


def bit_not(field: PrimeField, a: int) -> int:
    # Complement within the bit width of the modulus, then reduce.
    return ((1 << field.modulus.bit_length()) - 1 - a) % field.modulus


def apply_unary(field: PrimeField, op: str, a: int) -> int:
    if op == "-":
        return field.neg(a)
    if op == "!":
        return int(a == 0)
    if op == "~":
        return bit_not(field, a)
    raise ValueError(f"unknown unary operator {op!r}")


def fold_binary(field: PrimeField, op: str, left: Expr, right: Expr) -> Expr:
    if isinstance(left, Const) and isinstance(right, Const):
        try:
            return Const(apply_binary(field, op, left.value, right.value))
        except ArithmeticAbort:
            return Binary(op, left, right)  # left for the runtime to abort on
    if op == "+":
        if left == Const(0):
            return right
        if right == Const(0):
            return left
    if op == "-" and right == Const(0):
        return left
    if op == "*":
        if left == Const(1):
            return right
        if right == Const(1):
            return left
    return Binary(op, left, right)


def fold_unary(field: PrimeField, op: str, operand: Expr) -> Expr:
    if isinstance(operand, Const):
        return Const(apply_unary(field, op, operand.value))
    return Unary(op, operand)


def expr_slots(e: Expr, out: set | None = None) -> set:
    """All slot indices an expression may read."""
    out = set() if out is None else out
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Slot):
            out.add(n.index)
        elif isinstance(n, Unary):
            stack.append(n.operand)
        elif isinstance(n, Binary):
            stack += (n.left, n.right)
        elif isinstance(n, Ternary):
            stack += (n.cond, n.then, n.other)
        elif isinstance(n, Select):
            stack.extend(n.items)
            stack.append(n.index)
    return out


def binary_ops(e: Expr) -> list:
    """Binary operator nodes in preorder; positions are mutation op indices."""
    found = []

    def visit(n):
        if isinstance(n, Binary):
            found.append(n)
            visit(n.left)
            visit(n.right)
        elif isinstance(n, Unary):
            visit(n.operand)
        elif isinstance(n, Ternary):
            visit(n.cond)
            visit(n.then)
            visit(n.other)
        elif isinstance(n, Select):
            for i in n.items:
                visit(i)
            visit(n.index)

    visit(e)
    return found


def replace_ops(e: Expr, replacements: dict) -> Expr:
    """Rebuild ``e`` with the preorder-indexed binary ops swapped."""
    counter = [0]

    def visit(n):
        if isinstance(n, Binary):
            idx = counter[0]
            counter[0] += 1
            left = visit(n.left)
            right = visit(n.right)
            return Binary(replacements.get(idx, n.op), left, right)
        if isinstance(n, Unary):
            return Unary(n.op, visit(n.operand))
        if isinstance(n, Ternary):
            return Ternary(visit(n.cond), visit(n.then), visit(n.other))
        if isinstance(n, Select):
            return Select(tuple(visit(i) for i in n.items), visit(n.index))
        return n

    return visit(e)


def remap_expr(e: Expr, mapping) -> Expr:
    if isinstance(e, Slot):
        return Slot(mapping[e.index])
    if isinstance(e, Unary):
        return Unary(e.op, remap_expr(e.operand, mapping))
    if isinstance(e, Binary):
        return Binary(e.op, remap_expr(e.left, mapping), remap_expr(e.right, mapping))
    if isinstance(e, Ternary):
        return Ternary(*(remap_expr(x, mapping) for x in (e.cond, e.then, e.other)))
    if isinstance(e, Select):
        return Select(tuple(remap_expr(i, mapping) for i in e.items), remap_expr(e.index, mapping))
    return e


_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7, "<<": 8, ">>": 8, "+": 9, "-": 9,
    "*": 10, "/": 10, "\\": 10, "%": 10, "**": 12,
}


def format_expr(e: Expr, names=None) -> str:
    def name(i):
        return names[i] if names is not None else f"s{i}"

    def fmt(n, parent=0):
        if isinstance(n, Const):
            return str(n.value)
        if isinstance(n, Slot):
            return name(n.index)
        if isinstance(n, Unary):
            return f"{n.op}{fmt(n.operand, 11)}"
        if isinstance(n, Binary):
            p = _PREC[n.op]
            s = f"{fmt(n.left, p)} {n.op} {fmt(n.right, p + 1)}"
            return f"({s})" if p < parent else s
        if isinstance(n, Ternary):
            s = f"{fmt(n.cond, 1)} ? {fmt(n.then)} : {fmt(n.other)}"
            return f"({s})" if parent else s
        if isinstance(n, Select):
            return "[" + ", ".join(fmt(i) for i in n.items) + f"][{fmt(n.index)}]"
        raise TypeError(n)

    return fmt(e)


# -- instructions ---------------------------------------------------------------

ASSIGN_KINDS = ("weak", "strong")


@dataclass(frozen=True)
class Instruction:
    """One step of the computation program.

    kind is "weak" (``<--``), "strong" (``<==``), "assert" or "eq" (``===``).
    For "eq", ``expr`` and ``other`` are the two sides and ``enforce`` says
    whether the unmutated program checks them at runtime.
    """

    kind: str
    expr: Expr
    target: int | None = None
    other: Expr | None = None
    enforce: bool = True
    templates: tuple = ()
    span: Span = NO_SPAN

    @property
    def is_assignment(self) -> bool:
        return self.kind in ASSIGN_KINDS

    @property
    def is_check(self) -> bool:
        return self.kind == "assert" or (self.kind == "eq" and self.enforce)

    def reads(self) -> set:
        s = expr_slots(self.expr)
        if self.other is not None:
            expr_slots(self.other, s)
        return s


# -- polynomials ----------------------------------------------------------------

class NonPolynomial(ValueError):
    pass


class Poly:
    """Sparse polynomial over slots: {sorted slot tuple: coefficient}."""

    __slots__ = ("terms", "modulus")

    def __init__(self, terms: dict, modulus: int):
        self.modulus = modulus
        self.terms = {m: c % modulus for m, c in terms.items() if c % modulus}

    @classmethod
    def constant(cls, value: int, modulus: int) -> "Poly":
        return cls({(): value}, modulus)

    @classmethod
    def variable(cls, slot: int, modulus: int) -> "Poly":
        return cls({(slot,): 1}, modulus)

    def __add__(self, other: "Poly") -> "Poly":
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Poly(terms, self.modulus)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, self.modulus)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                terms[m] = terms.get(m, 0) + c1 * c2
        return Poly(terms, self.modulus)

    def scale(self, k: int) -> "Poly":
        return Poly({m: c * k for m, c in self.terms.items()}, self.modulus)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms and self.modulus == other.modulus

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.modulus))

    def __repr__(self):
        return f"Poly({self.terms!r}, {self.modulus})"

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def slots(self) -> set:
        return {s for m in self.terms for s in m}

    def evaluate(self, values) -> int:
        q = self.modulus
        total = 0
        for m, c in self.terms.items():
            t = c
            for s in m:
                t = t * values[s] % q
            total += t
        return total % q

    def remap(self, mapping) -> "Poly":
        return Poly({tuple(sorted(mapping[s] for s in m)): c for m, c in self.terms.items()}, self.modulus)

    def substitute(self, values: dict) -> "Poly":
        """Fix the slots in ``values`` and keep the rest symbolic."""
        terms: dict = {}
        for m, c in self.terms.items():
            rest = []
            for s in m:
                if s in values:
                    c = c * values[s]
                else:
                    rest.append(s)
            key = tuple(rest)
            terms[key] = terms.get(key, 0) + c
        return Poly(terms, self.modulus)

    def format(self, names=None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[m]
            factors = [names[s] if names is not None else f"s{s}" for s in m]
            if c != 1 or not factors:
                factors.insert(0, str(c))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [[str(c), list(m)] for m, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))]


def to_poly(e: Expr, field: PrimeField) -> Poly:
    """Convert an expression into a polynomial, or raise NonPolynomial."""
    q = field.modulus
    if isinstance(e, Const):
        return Poly.constant(e.value, q)
    if isinstance(e, Slot):
        return Poly.variable(e.index, q)
    if isinstance(e, Unary) and e.op == "-":
        return -to_poly(e.operand, field)
    if isinstance(e, Binary):
        if e.op in ("+", "-", "*"):
            a, b = to_poly(e.left, field), to_poly(e.right, field)
            return a + b if e.op == "+" else a - b if e.op == "-" else a * b
        if e.op == "/" and isinstance(e.right, Const) and e.right.value:
            return to_poly(e.left, field).scale(field.inv(e.right.value))
        if e.op == "**" and isinstance(e.right, Const):
            base = to_poly(e.left, field)
            result = Poly.constant(1, q)
            for _ in range(e.right.value):
                result = result * base
                if result.degree > 2:
                    raise NonPolynomial("degree exceeds 2")
            return result
        raise NonPolynomial(f"operator '{e.op}' cannot appear in a constraint")
    raise NonPolynomial(f"{type(e).__name__.lower()} expression cannot appear in a constraint")


@dataclass(frozen=True)
class Constraint:
    """``poly == 0`` where ``poly`` is lhs - rhs."""

    poly: Poly
    templates: tuple = ()
    span: Span = NO_SPAN

    def remap(self, mapping) -> "Constraint":
        return Constraint(self.poly.remap(mapping), self.templates, self.span)
