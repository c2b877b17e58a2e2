"""Lower a parsed program into a computation program plus constraints.

Templates are instantiated with concrete parameters, loops are unrolled and
variables are evaluated symbolically, so the result is a straight-line list
of instructions over signal slots together with a list of degree-2
polynomial constraints.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field as dc_field

from .field import PrimeField
from .frontend import ast as A
from .frontend.lexer import Diagnostic
from .ir import (
    Binary, Const, Constraint, Instruction, NonPolynomial, Poly, Select, Slot, Ternary,
    fold_binary, fold_unary, format_expr, remap_expr, to_poly,
)

LOOP_LIMIT = 1_000_000
MAX_DIM = 1_000_000


class CompileError(Diagnostic):
    pass


@dataclass(frozen=True)
class CompileFlags:
    constraint_assert_disabled: bool = False


@dataclass(frozen=True)
class SignalLayout:
    """Slot table. Slots are role-partitioned: inputs, intermediates, outputs."""

    names: tuple
    n_inputs: int
    n_intermediates: int
    n_outputs: int
    arrays: tuple = ()  # (qualified base name, dims) for every signal array

    def __len__(self):
        return len(self.names)

    def role(self, slot: int) -> str:
        if slot < self.n_inputs:
            return "input"
        if slot < self.n_inputs + self.n_intermediates:
            return "intermediate"
        return "output"

    def slot(self, name: str) -> int:
        return self.names.index(name)

    @property
    def inputs(self) -> range:
        return range(0, self.n_inputs)

    @property
    def intermediates(self) -> range:
        return range(self.n_inputs, self.n_inputs + self.n_intermediates)

    @property
    def outputs(self) -> range:
        return range(self.n_inputs + self.n_intermediates, len(self.names))


@dataclass(frozen=True)
class CompiledCircuit:
    name: str
    field: PrimeField
    layout: SignalLayout
    instructions: tuple
    constraints: tuple
    flags: CompileFlags = CompileFlags()
    array_dims: tuple = ()  # every array dimension declared anywhere

    @property
    def n(self) -> int:
        return self.layout.n_inputs

    @property
    def k(self) -> int:
        return self.layout.n_intermediates

    @property
    def m(self) -> int:
        return self.layout.n_outputs


# -- lowering state ---------------------------------------------------------------

@dataclass
class _Signal:
    name: str
    role: str  # "input", "output", "intermediate"
    dims: tuple
    slots: object  # int or nested list of ints


@dataclass
class _Instance:
    template: str
    prefix: str
    chain: tuple
    parent: "_Instance | None"
    env: dict = dc_field(default_factory=dict)
    buffer: list = dc_field(default_factory=list)
    input_order: list = dc_field(default_factory=list)
    outputs: list = dc_field(default_factory=list)
    pending: set = dc_field(default_factory=set)  # unassigned input slots
    children: list = dc_field(default_factory=list)
    spliced: bool = False
    anon_counter: int = 0


def _nested(dims, make):
    if not dims:
        return make(())
    return [_nested(dims[1:], lambda rest, i=i: make((i,) + rest)) for i in range(dims[0])]


def _flatten(value):
    if isinstance(value, list):
        out = []
        for v in value:
            out.extend(_flatten(v))
        return out
    return [value]


def _shape(value) -> tuple:
    if isinstance(value, list):
        inner = _shape(value[0]) if value else ()
        return (len(value),) + inner
    return ()


def _map_nested(value, fn):
    if isinstance(value, list):
        return [_map_nested(v, fn) for v in value]
    return fn(value)


def _index_text(path) -> str:
    return "".join(f"[{i}]" for i in path)


class _Lowerer:
    def __init__(self, program: A.SourceProgram, field: PrimeField, flags: CompileFlags):
        self.program = program
        self.field = field
        self.flags = flags
        self.slots: list = []  # (name, layout role)
        self.owner: list = []  # (instance, signal role) per provisional slot
        self.assigned: set = set()
        self.constraints: list = []
        self.arrays: list = []
        self.array_dims: list = []
        self.inst: _Instance | None = None

    # -- helpers -------------------------------------------------------------

    def error(self, node, message: str):
        span = getattr(node, "span", A.NO_SPAN)
        raise CompileError(span, message)

    def const_int(self, value, node, what: str) -> int:
        if not isinstance(value, Const):
            self.error(node, f"{what} must be known at compile time")
        v = value.value
        if v > self.field.half:
            v -= self.field.modulus
        return v

    def new_slot(self, name: str, inst: _Instance, role: str) -> int:
        if inst.parent is None:
            layout_role = role if role in ("input", "output") else "intermediate"
        else:
            layout_role = "intermediate"
        self.slots.append((name, layout_role))
        self.owner.append((inst, role))
        return len(self.slots) - 1

    # -- instances -----------------------------------------------------------

    def instantiate(self, name: str, args: list, prefix: str, node) -> _Instance:
        try:
            decl = self.program.template(name)
        except KeyError:
            self.error(node, f"unknown template '{name}'")
        parent = self.inst
        chain = (parent.chain if parent else ()) + (name,)
        if parent is not None and name in parent.chain:
            self.error(node, f"recursive instantiation of template '{name}'")
        if len(args) != len(decl.params):
            self.error(node, f"template '{name}' expects {len(decl.params)} parameters, got {len(args)}")
        inst = _Instance(name, prefix, chain, parent)
        for p, v in zip(decl.params, args):
            inst.env[p] = ("var", v)
        self.inst = inst
        try:
            for stmt in decl.body:
                self.stmt(stmt)
            for child in inst.children:
                if not child.spliced:
                    missing = sorted(self.slots[s][0] for s in child.pending)
                    self.error(decl, f"component {child.prefix} has unassigned inputs: {', '.join(missing)}")
        finally:
            self.inst = parent
        if parent is not None:
            parent.children.append(inst)
            if not inst.pending:
                self.splice(inst)
        return inst

    def splice(self, child: _Instance):
        child.parent.buffer.extend(child.buffer)
        child.buffer = []
        child.spliced = True

    # -- statements ----------------------------------------------------------

    def stmt(self, s):
        if isinstance(s, A.Block):
            for inner in s.stmts:
                self.stmt(inner)
        elif isinstance(s, A.SignalDecl):
            self.signal_decl(s)
        elif isinstance(s, A.VarDecl):
            for item in s.items:
                if item.init is not None:
                    value = copy.deepcopy(self.eval(item.init))
                else:
                    dims = self.dims(item.dims)
                    value = _nested(dims, lambda _: Const(0))
                self.inst.env[item.name] = ("var", value)
        elif isinstance(s, A.ComponentDecl):
            dims = self.dims(s.dims)
            if s.value is not None:
                if dims:
                    self.error(s, "a component array cannot be initialised in its declaration")
                self.inst.env[s.name] = ("comp", self.create_component(s.value, s.name))
            else:
                self.inst.env[s.name] = ("comp", _nested(dims, lambda _: None))
        elif isinstance(s, A.Assign):
            self.assign(s)
        elif isinstance(s, A.ConstraintEq):
            self.constraint_eq(s)
        elif isinstance(s, A.Assert):
            cond = self.eval(s.expr)
            if isinstance(cond, list):
                self.error(s, "assert expects a scalar expression")
            self.emit(Instruction("assert", cond, span=s.span))
        elif isinstance(s, A.For):
            self.for_loop(s)
        elif isinstance(s, A.If):
            cond = self.eval(s.cond)
            if not isinstance(cond, Const):
                self.error(s, "if condition must be known at compile time; use a ternary for signal-dependent values")
            if cond.value:
                self.stmt(s.then)
            elif s.other is not None:
                self.stmt(s.other)
        else:
            self.error(s, f"unsupported statement {type(s).__name__}")

    def emit(self, instr: Instruction):
        instr = Instruction(instr.kind, instr.expr, instr.target, instr.other, instr.enforce,
                            self.inst.chain, instr.span)
        self.inst.buffer.append(instr)

    def dims(self, exprs) -> tuple:
        out = []
        for e in exprs:
            d = self.const_int(self.eval(e), e, "array dimension")
            if d < 0 or d > MAX_DIM:
                self.error(e, f"invalid array dimension {d}")
            out.append(d)
        return tuple(out)

    def signal_decl(self, s: A.SignalDecl):
        role = s.role or "intermediate"
        value = None
        if s.op is not None:
            value = self.eval(s.value)
        for item in s.items:
            if item.name in self.inst.env:
                self.error(item, f"'{item.name}' is already declared")
            dims = self.dims(item.dims)
            if not dims and isinstance(value, list):
                dims = _shape(value)
            base = f"{self.inst.prefix}.{item.name}"
            slots = _nested(dims, lambda path: self.new_slot(base + _index_text(path), self.inst, role))
            if dims:
                self.arrays.append((base, dims))
                self.array_dims.extend(dims)
            sig = _Signal(item.name, role, dims, slots)
            self.inst.env[item.name] = ("signal", sig)
            if role == "input":
                self.inst.input_order.append(sig)
                self.inst.pending.update(_flatten(slots))
            elif role == "output":
                self.inst.outputs.append(sig)
        if s.op is not None:
            sig = self.inst.env[s.items[0].name][1]
            self.assign_signal(sig.slots, value, s.op, s)

    def for_loop(self, s: A.For):
        if s.init is not None:
            self.stmt(s.init)
        count = 0
        while True:
            cond = self.eval(s.cond)
            if not isinstance(cond, Const):
                self.error(s, "loop condition must be known at compile time")
            if not cond.value:
                break
            count += 1
            if count > LOOP_LIMIT:
                self.error(s, f"loop exceeds {LOOP_LIMIT} iterations")
            self.stmt(s.body)
            if s.step is not None:
                self.stmt(s.step)

    _COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "\\=": "\\", "%=": "%",
                 "**=": "**", "<<=": "<<", ">>=": ">>", "&=": "&", "|=": "|", "^=": "^",
                 "++": "+", "--": "-"}

    def assign(self, s: A.Assign):
        kind, ref = self.lvalue(s.target)
        if s.op in ("<--", "<=="):
            if kind != "signal":
                self.error(s, f"'{s.op}' needs a signal on its left-hand side")
            self.assign_signal(ref, self.eval(s.value), s.op, s)
            return
        if kind == "signal":
            self.error(s, f"signals cannot be assigned with '{s.op}'; use '<--' or '<=='")
        if kind == "comp":
            if s.op != "=":
                self.error(s, "components can only be assigned with '='")
            holder, key, label = ref
            if holder[key] is not None and not isinstance(holder[key], list):
                self.error(s, f"component {label} is already instantiated")
            holder[key] = self.create_component(s.value, label)
            return
        holder, key = ref
        if s.op == "=":
            holder[key] = copy.deepcopy(self.eval(s.value))
            return
        op = self._COMPOUND[s.op]
        rhs = Const(1) if s.value is None else self.eval(s.value)
        cur = holder[key]
        if isinstance(cur, list) or isinstance(rhs, list):
            self.error(s, f"'{s.op}' needs scalar operands")
        holder[key] = fold_binary(self.field, op, cur, rhs)

    def create_component(self, value, label: str) -> _Instance:
        if not isinstance(value, A.Call):
            self.error(value, "components must be initialised with a template call")
        args = [self.eval(a) for a in value.args]
        for a, node in zip(args, value.args):
            if not isinstance(a, Const):
                self.error(node, "template parameters must be known at compile time")
        return self.instantiate(value.template, args, f"{self.inst.prefix}.{label}", value)

    def lvalue(self, target):
        """Resolve an assignment target.

        Returns ("var", (holder, key)), ("comp", (holder, key, label)) or
        ("signal", slots).
        """
        path = []
        node = target
        while isinstance(node, A.Index):
            path.append(node.index)
            node = node.base
        path.reverse()
        if isinstance(node, A.Member):
            inst = self.component_ref(node.base)
            sig = self.member_signal(inst, node.name, node)
            return "signal", self.select_static(sig.slots, path, target)
        if not isinstance(node, A.Name):
            self.error(target, "invalid assignment target")
        entry = self.inst.env.get(node.name)
        if entry is None:
            self.error(node, f"unknown identifier '{node.name}'")
        kind, obj = entry
        if kind == "signal":
            return "signal", self.select_static(obj.slots, path, target)
        idx = [self.const_int(self.eval(p), p, "subscript") for p in path]
        if kind == "var":
            if not idx:
                return "var", (_EnvSlot(self.inst.env, node.name), 0)
            holder = obj
            for i in idx[:-1]:
                holder = self.checked_item(holder, i, target)
            self.checked_item(holder, idx[-1], target)
            return "var", (holder, idx[-1])
        # component
        if not idx:
            return "comp", (_EnvSlot(self.inst.env, node.name, "comp"), 0, node.name)
        holder = obj
        for i in idx[:-1]:
            holder = self.checked_item(holder, i, target)
        self.checked_item(holder, idx[-1], target)
        return "comp", (holder, idx[-1], node.name + _index_text(idx))

    def checked_item(self, seq, i, node):
        if not isinstance(seq, list):
            self.error(node, "too many subscripts")
        if not 0 <= i < len(seq):
            self.error(node, f"index {i} out of range for length {len(seq)}")
        return seq[i]

    def select_static(self, slots, path, node):
        for p in path:
            i = self.const_int(self.eval(p), p, "signal subscript on the left-hand side")
            slots = self.checked_item(slots, i, node)
        return slots

    def component_ref(self, node) -> _Instance:
        path = []
        while isinstance(node, A.Index):
            path.append(node.index)
            node = node.base
        path.reverse()
        if not isinstance(node, A.Name):
            self.error(node, "expected a component")
        entry = self.inst.env.get(node.name)
        if entry is None or entry[0] != "comp":
            self.error(node, f"'{getattr(node, 'name', '?')}' is not a component")
        obj = entry[1]
        for p in path:
            obj = self.checked_item(obj, self.const_int(self.eval(p), p, "component subscript"), node)
        if not isinstance(obj, _Instance):
            self.error(node, "component used before it is instantiated")
        return obj

    def member_signal(self, inst: _Instance, name: str, node) -> _Signal:
        entry = inst.env.get(name)
        if entry is None or entry[0] != "signal" or entry[1].role == "intermediate":
            self.error(node, f"component {inst.prefix} has no input or output named '{name}'")
        return entry[1]

    def assign_signal(self, slots, value, op: str, node):
        if isinstance(slots, list) != isinstance(value, list):
            self.error(node, "array and scalar mismatch in signal assignment")
        if isinstance(slots, list):
            if len(slots) != len(value):
                self.error(node, f"array length mismatch: {len(slots)} vs {len(value)}")
            for s, v in zip(slots, value):
                self.assign_signal(s, v, op, node)
            return
        slot = slots
        owner, role = self.owner[slot]
        if owner is self.inst:
            if role == "input":
                self.error(node, f"cannot assign input signal {self.slots[slot][0]}")
        elif owner.parent is self.inst:
            if role != "input":
                self.error(node, f"cannot assign {role} signal {self.slots[slot][0]} of a subcomponent")
        else:
            self.error(node, f"signal {self.slots[slot][0]} is not assignable here")
        if slot in self.assigned:
            self.error(node, f"signal {self.slots[slot][0]} is assigned more than once")
        kind = "weak" if op == "<--" else "strong"
        self.emit(Instruction(kind, value, target=slot, span=node.span))
        if kind == "strong":
            self.add_constraint(Slot(slot), value, node)
        self.assigned.add(slot)
        if owner is not self.inst:
            owner.pending.discard(slot)
            if not owner.pending and not owner.spliced:
                self.splice(owner)

    def add_constraint(self, left, right, node):
        try:
            poly = to_poly(left, self.field) - to_poly(right, self.field)
        except NonPolynomial as exc:
            self.error(node, f"non-quadratic constraint: {exc}")
        if poly.degree > 2:
            self.error(node, f"non-quadratic constraint: degree {poly.degree} exceeds 2")
        self.constraints.append(Constraint(poly, self.inst.chain, node.span))

    def constraint_eq(self, s: A.ConstraintEq):
        left, right = self.eval(s.left), self.eval(s.right)
        pairs = list(zip(_flatten(left), _flatten(right)))
        if _shape(left) != _shape(right):
            self.error(s, "array and scalar mismatch in '==='")
        for l, r in pairs:
            self.add_constraint(l, r, s)
            self.emit(Instruction("eq", l, other=r, enforce=not self.flags.constraint_assert_disabled,
                                  span=s.span))

    # -- expressions ---------------------------------------------------------

    def eval(self, e):
        f = self.field
        if isinstance(e, A.Number):
            return Const(e.value % f.modulus)
        if isinstance(e, A.Name):
            entry = self.inst.env.get(e.name)
            if entry is None:
                self.error(e, f"unknown identifier '{e.name}'")
            kind, obj = entry
            if kind == "var":
                return obj
            if kind == "signal":
                return _map_nested(obj.slots, Slot)
            self.error(e, f"component '{e.name}' used as a value")
        if isinstance(e, A.Index):
            return self.index_value(self.eval(e.base), self.eval(e.index), e)
        if isinstance(e, A.Member):
            inst = self.component_ref(e.base)
            sig = self.member_signal(inst, e.name, e)
            if sig.role == "output" and not inst.spliced:
                self.error(e, f"output {inst.prefix}.{e.name} read before all inputs of the component are assigned")
            return _map_nested(sig.slots, Slot)
        if isinstance(e, A.Unary):
            v = self.eval(e.operand)
            if isinstance(v, list):
                self.error(e, "operator applied to an array")
            return fold_unary(f, e.op, v)
        if isinstance(e, A.BinOp):
            a, b = self.eval(e.left), self.eval(e.right)
            if isinstance(a, list) or isinstance(b, list):
                self.error(e, "operator applied to an array")
            return fold_binary(f, e.op, a, b)
        if isinstance(e, A.Ternary):
            c = self.eval(e.cond)
            if isinstance(c, list):
                self.error(e, "array used as a condition")
            if isinstance(c, Const):
                return self.eval(e.then) if c.value else self.eval(e.other)
            t, o = self.eval(e.then), self.eval(e.other)
            if isinstance(t, list) or isinstance(o, list):
                self.error(e, "signal-dependent ternary over arrays is not supported")
            return Ternary(c, t, o)
        if isinstance(e, A.ArrayLit):
            return [self.eval(i) for i in e.items]
        if isinstance(e, A.AnonCall):
            return self.anon_call(e)
        if isinstance(e, A.Call):
            self.error(e, "template call outside a component instantiation")
        self.error(e, f"unsupported expression {type(e).__name__}")

    def index_value(self, base, idx, node):
        if not isinstance(base, list):
            self.error(node, "subscript applied to a scalar")
        if isinstance(idx, list):
            self.error(node, "array used as a subscript")
        if isinstance(idx, Const):
            i = idx.value
            if i >= len(base):
                self.error(node, f"index {i} out of range for length {len(base)}")
            return base[i]
        if base and isinstance(base[0], list):
            # Runtime row selection over a matrix: select per column.
            return [self.index_value([row[c] for row in base], idx, node) for c in range(len(base[0]))]
        return Select(tuple(base), idx)

    def anon_call(self, e: A.AnonCall):
        args = [self.eval(a) for a in e.args]
        for a, node in zip(args, e.args):
            if not isinstance(a, Const):
                self.error(node, "template parameters must be known at compile time")
        values = [self.eval(v) for v in e.inputs]
        self.inst.anon_counter += 1
        label = f"{e.template}_{self.inst.anon_counter}"
        inst = self.instantiate(e.template, args, f"{self.inst.prefix}.{label}", e)
        if len(values) != len(inst.input_order):
            self.error(e, f"template '{e.template}' has {len(inst.input_order)} inputs, got {len(values)}")
        for sig, v in zip(inst.input_order, values):
            self.assign_signal(sig.slots, v, "<==", e)
        if len(inst.outputs) != 1:
            self.error(e, f"call-style use of '{e.template}' needs exactly one output")
        return _map_nested(inst.outputs[0].slots, Slot)

    # -- driver --------------------------------------------------------------

    def run(self) -> CompiledCircuit:
        main = self.program.main
        root = _Instance("<root>", "", (), None)
        self.inst = root
        args = [self.eval(a) for a in main.args]
        for a, node in zip(args, main.args):
            if not isinstance(a, Const):
                self.error(node, "main parameters must be constants")
        self.inst = None
        inst = self.instantiate(main.template, args, "main", main)
        for s in inst.pending:
            self.assigned.add(s)
        return self.finish(inst)

    def finish(self, main: _Instance) -> CompiledCircuit:
        order = ([i for i, (_, r) in enumerate(self.slots) if r == "input"]
                 + [i for i, (_, r) in enumerate(self.slots) if r == "intermediate"]
                 + [i for i, (_, r) in enumerate(self.slots) if r == "output"])
        mapping = [0] * len(order)
        for new, old in enumerate(order):
            mapping[old] = new
        instrs = []
        for ins in main.buffer:
            instrs.append(Instruction(
                ins.kind, remap_expr(ins.expr, mapping),
                None if ins.target is None else mapping[ins.target],
                None if ins.other is None else remap_expr(ins.other, mapping),
                ins.enforce, ins.templates, ins.span))
        roles = [r for _, r in self.slots]
        layout = SignalLayout(
            names=tuple(self.slots[old][0] for old in order),
            n_inputs=roles.count("input"),
            n_intermediates=roles.count("intermediate"),
            n_outputs=roles.count("output"),
            arrays=tuple(self.arrays),
        )
        return CompiledCircuit(
            name=main.template,
            field=self.field,
            layout=layout,
            instructions=tuple(instrs),
            constraints=tuple(c.remap(mapping) for c in self.constraints),
            flags=self.flags,
            array_dims=tuple(self.array_dims),
        )


class _EnvSlot:
    """Adapter so a whole variable or component binding can be assigned via
    ``holder[key] = value`` like an array element."""

    def __init__(self, env: dict, name: str, kind: str = "var"):
        self.env, self.name, self.kind = env, name, kind

    def __getitem__(self, _):
        return self.env[self.name][1]

    def __setitem__(self, _, value):
        self.env[self.name] = (self.kind, value)


def lower(program: A.SourceProgram, field: PrimeField, flags: CompileFlags = CompileFlags()) -> CompiledCircuit:
    """Instantiate ``program.main`` and return its computation and constraints."""
    return _Lowerer(program, field, flags).run()


def compile_source(text: str, field: PrimeField, flags: CompileFlags = CompileFlags()) -> CompiledCircuit:
    from .frontend import parse

    return lower(parse(text), field, flags)


def compile_file(path, field: PrimeField, flags: CompileFlags = CompileFlags()) -> CompiledCircuit:
    from .frontend import load_program

    return lower(load_program(path), field, flags)


# -- reports ------------------------------------------------------------------------

def format_instruction(ins: Instruction, names) -> str:
    if ins.kind == "weak":
        return f"{names[ins.target]} <-- {format_expr(ins.expr, names)}"
    if ins.kind == "strong":
        return f"{names[ins.target]} <== {format_expr(ins.expr, names)}"
    if ins.kind == "assert":
        return f"assert({format_expr(ins.expr, names)})"
    text = f"{format_expr(ins.expr, names)} === {format_expr(ins.other, names)}"
    return text if ins.enforce else text + "  (not checked)"


def dump(circuit: CompiledCircuit) -> str:
    """Human-readable listing of layout, instructions and constraints."""
    lay = circuit.layout
    names = lay.names
    lines = [
        f"circuit {circuit.name}  q={circuit.field.modulus}",
        f"signals: n={lay.n_inputs} k={lay.n_intermediates} m={lay.n_outputs}",
    ]
    for i, name in enumerate(names):
        lines.append(f"  [{i}] {lay.role(i):<12} {name}")
    lines.append(f"instructions: {len(circuit.instructions)}")
    for i, ins in enumerate(circuit.instructions):
        lines.append(f"  {i:>4}  {ins.kind:<6}  {format_instruction(ins, names)}")
    lines.append(f"constraints: {len(circuit.constraints)}")
    for i, c in enumerate(circuit.constraints):
        lines.append(f"  {i:>4}  {c.poly.format(names)} == 0")
    return "\n".join(lines) + "\n"


def to_json(circuit: CompiledCircuit) -> dict:
    lay = circuit.layout
    return {
        "schema": 1,
        "name": circuit.name,
        "prime": str(circuit.field.modulus),
        "flags": {"constraint_assert_disabled": circuit.flags.constraint_assert_disabled},
        "layout": {
            "n": lay.n_inputs, "k": lay.n_intermediates, "m": lay.n_outputs,
            "slots": [{"index": i, "name": nm, "role": lay.role(i)} for i, nm in enumerate(lay.names)],
        },
        "constraints": [c.poly.to_json() for c in circuit.constraints],
        "instructions": [
            {
                "index": i,
                "kind": ins.kind,
                "target": ins.target,
                "text": format_instruction(ins, lay.names),
                "templates": list(ins.templates),
                "line": ins.span.line,
            }
            for i, ins in enumerate(circuit.instructions)
        ],
    }


def dumps_json(circuit: CompiledCircuit) -> str:
    return json.dumps(to_json(circuit), sort_keys=True)
