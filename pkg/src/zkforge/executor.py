"""Run a computation program on concrete inputs.

Two independent evaluators share the same semantics:

* ``Executor`` turns the whole instruction list (with a mutant's overrides)
  into one Python function and caches it per mutation shape. This is the
  fast path the fuzzer uses.
* ``interpret`` walks the expression trees directly. It is the reference
  used to re-check bug reports and to probe partial executions.

Runtime faults never escape: they become abort traces.
"""

from __future__ import annotations

from .compiler import CompiledCircuit
from .field import ArithmeticAbort
from .ir import (
    Binary, Const, Select, Slot, Ternary, Unary, apply_binary, apply_unary, bit_not, replace_ops,
)

MAX_INSTRUCTIONS = 10_000_000
_HOIST_DEPTH = 40

ASSERTION = "assertion"
DIVISION_BY_ZERO = "division-by-zero"
OUT_OF_RANGE = "out-of-range"


class ExecutionBudgetExceeded(RuntimeError):
    """The program is longer than the per-execution instruction cap."""


class AbortReason:
    __slots__ = ("kind", "instruction", "value", "length")

    def __init__(self, kind: str, instruction: int, value: int | None = None, length: int | None = None):
        self.kind = kind
        self.instruction = instruction
        self.value = value
        self.length = length

    def __eq__(self, other):
        return isinstance(other, AbortReason) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def as_tuple(self):
        return (self.kind, self.instruction, self.value, self.length)

    def __repr__(self):
        extra = f", value={self.value}, length={self.length}" if self.kind == OUT_OF_RANGE else ""
        return f"AbortReason({self.kind}, instruction={self.instruction}{extra})"

    def to_json(self) -> dict:
        d = {"kind": self.kind, "instruction": self.instruction}
        if self.kind == OUT_OF_RANGE:
            d["value"] = str(self.value)
            d["length"] = self.length
        return d


class _Abort(Exception):
    def __init__(self, kind, instruction, value=None, length=None):
        self.reason = AbortReason(kind, instruction, value, length)


class ExecutionTrace:
    """Inputs plus either every slot value (ok) or an abort reason."""

    __slots__ = ("inputs", "values", "reason", "n", "k")

    def __init__(self, inputs: tuple, values: tuple | None, reason: AbortReason | None, n: int, k: int):
        self.inputs = inputs
        self.values = values
        self.reason = reason
        self.n = n
        self.k = k

    @property
    def ok(self) -> bool:
        return self.reason is None

    @property
    def status(self) -> str:
        return "ok" if self.reason is None else "abort"

    @property
    def x(self) -> tuple:
        return self.inputs

    @property
    def z(self) -> tuple | None:
        return None if self.values is None else self.values[self.n:self.n + self.k]

    @property
    def y(self) -> tuple | None:
        """Outputs, or None for the abort value."""
        return None if self.values is None else self.values[self.n + self.k:]

    def __eq__(self, other):
        return (isinstance(other, ExecutionTrace) and self.inputs == other.inputs
                and self.values == other.values and self.reason == other.reason)

    def __hash__(self):
        return hash((self.inputs, self.values, self.reason))

    def __repr__(self):
        if self.ok:
            return f"ExecutionTrace(x={self.x}, z={self.z}, y={self.y})"
        return f"ExecutionTrace(x={self.x}, abort={self.reason!r})"

    def to_json(self) -> dict:
        d = {"status": self.status, "x": [str(v) for v in self.inputs]}
        if self.ok:
            d["z"] = [str(v) for v in self.z]
            d["y"] = [str(v) for v in self.y]
        else:
            d["reason"] = self.reason.to_json()
        return d


def _check_size(circuit: CompiledCircuit):
    if len(circuit.instructions) > MAX_INSTRUCTIONS:
        raise ExecutionBudgetExceeded(
            f"program has {len(circuit.instructions)} instructions, cap is {MAX_INSTRUCTIONS}")


def _plan(genome):
    return {} if genome is None else genome.plan


# -- reference interpreter -----------------------------------------------------------

def _eval(e, vals, field, idx):
    if isinstance(e, Slot):
        return vals[e.index]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Binary):
        op = e.op
        a = _eval(e.left, vals, field, idx)
        if op == "&&":
            return int(bool(a) and bool(_eval(e.right, vals, field, idx)))
        if op == "||":
            return int(bool(a) or bool(_eval(e.right, vals, field, idx)))
        b = _eval(e.right, vals, field, idx)
        try:
            return apply_binary(field, op, a, b)
        except ArithmeticAbort:
            raise _Abort(DIVISION_BY_ZERO, idx) from None
    if isinstance(e, Unary):
        return apply_unary(field, e.op, _eval(e.operand, vals, field, idx))
    if isinstance(e, Ternary):
        c = _eval(e.cond, vals, field, idx)
        return _eval(e.then if c else e.other, vals, field, idx)
    if isinstance(e, Select):
        i = _eval(e.index, vals, field, idx)
        if i >= len(e.items):
            raise _Abort(OUT_OF_RANGE, idx, i, len(e.items))
        return _eval(e.items[i], vals, field, idx)
    raise TypeError(e)


def _interpret_values(circuit, x, genome, stop):
    field = circuit.field
    plan = _plan(genome)
    mutated = genome is not None
    consts = genome.constants if mutated else ()
    vals = list(x) + [0] * (len(circuit.layout) - len(x))
    for idx, ins in enumerate(circuit.instructions):
        if stop is not None and idx >= stop:
            break
        if ins.target is not None:
            action = plan.get(idx)
            tag = None if action is None else action[0]
            if tag == "const":
                vals[ins.target] = consts[action[1]]
            elif tag == "delete":
                vals[ins.target] = 0
            elif tag == "add":
                vals[ins.target] = (_eval(ins.expr, vals, field, idx) + consts[action[1]]) % field.modulus
            elif tag == "ops":
                vals[ins.target] = _eval(replace_ops(ins.expr, action[1]), vals, field, idx)
            else:
                vals[ins.target] = _eval(ins.expr, vals, field, idx)
        elif mutated:
            continue  # mutants run without any runtime checks
        elif ins.kind == "assert":
            if not _eval(ins.expr, vals, field, idx):
                raise _Abort(ASSERTION, idx)
        elif ins.enforce:
            if _eval(ins.expr, vals, field, idx) != _eval(ins.other, vals, field, idx):
                raise _Abort(ASSERTION, idx)
    return vals


def interpret(circuit: CompiledCircuit, x, genome=None) -> ExecutionTrace:
    """Reference evaluator: walk the expression trees one node at a time."""
    _check_size(circuit)
    x = _normalise_inputs(circuit, x)
    lay = circuit.layout
    try:
        vals = _interpret_values(circuit, x, genome, None)
    except _Abort as a:
        return ExecutionTrace(x, None, a.reason, lay.n_inputs, lay.n_intermediates)
    return ExecutionTrace(x, tuple(vals), None, lay.n_inputs, lay.n_intermediates)


def run_prefix(circuit: CompiledCircuit, x, stop: int):
    """Slot values just before instruction ``stop`` of the original program,
    or None when execution aborts earlier."""
    try:
        return _interpret_values(circuit, tuple(x), None, stop)
    except _Abort:
        return None


def evaluate_expr(circuit: CompiledCircuit, e, values) -> int | None:
    try:
        return _eval(e, values, circuit.field, -1)
    except _Abort:
        return None


def _normalise_inputs(circuit, x) -> tuple:
    q = circuit.field.modulus
    out = tuple(int(v) for v in x)
    if len(out) != circuit.n:
        raise ValueError(f"expected {circuit.n} inputs, got {len(out)}")
    for v in out:
        if not 0 <= v < q:
            raise ValueError(f"input {v} is not a canonical residue mod {q}")
    return out


# -- code generation -------------------------------------------------------------------

def _make_helpers(circuit: CompiledCircuit) -> dict:
    field = circuit.field
    q = field.modulus
    half = field.half

    def div(a, b, i):
        if b == 0:
            raise _Abort(DIVISION_BY_ZERO, i)
        return a * pow(b, -1, q) % q

    def idiv(a, b, i):
        if b == 0:
            raise _Abort(DIVISION_BY_ZERO, i)
        return a // b

    def imod(a, b, i):
        if b == 0:
            raise _Abort(DIVISION_BY_ZERO, i)
        return a % b

    def sel(items, j, i):
        if j >= len(items):
            raise _Abort(OUT_OF_RANGE, i, j, len(items))
        return items[j]

    def sel_lazy(items, j, i):
        if j >= len(items):
            raise _Abort(OUT_OF_RANGE, i, j, len(items))
        return items[j]()

    def s(a):
        return a - q if a > half else a

    return {
        "Q": q, "_div": div, "_idiv": idiv, "_imod": imod, "_sel": sel, "_sel_lazy": sel_lazy,
        "_shl": field.shl, "_shr": field.shr, "_pow": field.pow, "_s": s,
        "_not": lambda a: bit_not(field, a),
    }


class _Gen:
    def __init__(self, idx: int):
        self.idx = idx
        self.pre: list = []  # hoisted temporaries for the current statement
        self.counter = 0

    def hoist(self, code: str) -> str:
        self.counter += 1
        name = f"t{self.idx}_{self.counter}"
        self.pre.append(f"{name} = {code}")
        return name

    def expr(self, e, lazy=False, depth=0) -> str:
        if isinstance(e, Slot):
            return f"v{e.index}"
        if isinstance(e, Const):
            return str(e.value)
        code = self._expr(e, lazy, depth)
        if depth > _HOIST_DEPTH and not lazy:
            return self.hoist(code)
        return code

    def _expr(self, e, lazy, depth) -> str:
        i = self.idx
        d = depth + 1
        if isinstance(e, Binary):
            op = e.op
            a = self.expr(e.left, lazy, d)
            if op in ("&&", "||"):
                b = self.expr(e.right, True, d)
                word = "and" if op == "&&" else "or"
                return f"(1 if ({a}) {word} ({b}) else 0)"
            b = self.expr(e.right, lazy, d)
            if op == "+":
                return f"(({a}) + ({b})) % Q"
            if op == "-":
                return f"(({a}) - ({b})) % Q"
            if op == "*":
                return f"({a}) * ({b}) % Q"
            if op == "/":
                return f"_div({a}, {b}, {i})"
            if op == "\\":
                return f"_idiv({a}, {b}, {i})"
            if op == "%":
                return f"_imod({a}, {b}, {i})"
            if op == "**":
                return f"_pow({a}, {b})"
            if op == "<<":
                return f"_shl({a}, {b})"
            if op == ">>":
                return f"_shr({a}, {b})"
            if op == "&":
                return f"(({a}) & ({b}))"
            if op == "|":
                return f"(({a}) | ({b})) % Q"
            if op == "^":
                return f"(({a}) ^ ({b})) % Q"
            if op == "==":
                return f"(1 if ({a}) == ({b}) else 0)"
            if op == "!=":
                return f"(1 if ({a}) != ({b}) else 0)"
            if op in ("<", "<=", ">", ">="):
                return f"(1 if _s({a}) {op} _s({b}) else 0)"
            raise ValueError(op)
        if isinstance(e, Unary):
            a = self.expr(e.operand, lazy, d)
            if e.op == "-":
                return f"(-({a})) % Q"
            if e.op == "!":
                return f"(0 if ({a}) else 1)"
            return f"_not({a})"
        if isinstance(e, Ternary):
            c = self.expr(e.cond, lazy, d)
            t = self.expr(e.then, True, d)
            o = self.expr(e.other, True, d)
            return f"(({t}) if ({c}) else ({o}))"
        if isinstance(e, Select):
            j = self.expr(e.index, lazy, d)
            if all(isinstance(it, (Slot, Const)) for it in e.items):
                items = ", ".join(self.expr(it, lazy, d) for it in e.items)
                return f"_sel(({items},), {j}, {i})"
            items = ", ".join(f"lambda: ({self.expr(it, True, d)})" for it in e.items)
            return f"_sel_lazy(({items},), {j}, {i})"
        raise TypeError(e)


def generate_source(circuit: CompiledCircuit, genome=None) -> str:
    """Python source of a function ``_run(x, K)`` returning all slot values."""
    lay = circuit.layout
    n, total = lay.n_inputs, len(lay)
    plan = _plan(genome)
    mutated = genome is not None
    lines = ["def _run(x, K):"]
    if n:
        lines.append("    " + "".join(f"v{i}, " for i in range(n)) + "= x")
    rest = [f"v{i}" for i in range(n, total)]
    for j in range(0, len(rest), 200):
        lines.append("    " + " = ".join(rest[j:j + 200]) + " = 0")
    for idx, ins in enumerate(circuit.instructions):
        g = _Gen(idx)
        if ins.target is not None:
            action = plan.get(idx)
            tag = None if action is None else action[0]
            if tag == "const":
                stmt = f"v{ins.target} = K[{action[1]}]"
            elif tag == "delete":
                stmt = f"v{ins.target} = 0"
            elif tag == "add":
                stmt = f"v{ins.target} = (({g.expr(ins.expr)}) + K[{action[1]}]) % Q"
            else:
                e = ins.expr if tag is None else replace_ops(ins.expr, action[1])
                stmt = f"v{ins.target} = {g.expr(e)}"
        elif mutated:
            continue
        elif ins.kind == "assert":
            stmt = f"if not ({g.expr(ins.expr)}): raise _Abort({ASSERTION!r}, {idx})"
        elif ins.enforce:
            stmt = f"if ({g.expr(ins.expr)}) != ({g.expr(ins.other)}): raise _Abort({ASSERTION!r}, {idx})"
        else:
            continue
        lines.extend("    " + p for p in g.pre)
        lines.append("    " + stmt)
    if total:
        lines.append("    return (" + "".join(f"v{i}, " for i in range(total)) + ")")
    else:
        lines.append("    return ()")
    return "\n".join(lines) + "\n"


class Executor:
    """Compiled evaluator for one circuit, caching a function per mutant shape."""

    def __init__(self, circuit: CompiledCircuit, cache_size: int = 4096):
        _check_size(circuit)
        self.circuit = circuit
        self.n = circuit.layout.n_inputs
        self.k = circuit.layout.n_intermediates
        self.cache_size = cache_size
        self._helpers = _make_helpers(circuit)
        self._helpers["_Abort"] = _Abort
        self._cache: dict = {}
        self._original = self._build(None)

    def _build(self, genome):
        src = generate_source(self.circuit, genome)
        ns = dict(self._helpers)
        try:
            exec(compile(src, f"<zkforge:{self.circuit.name}>", "exec"), ns)
        except (SyntaxError, RecursionError, MemoryError):
            circuit = self.circuit

            def fallback(x, K, genome=genome):
                return tuple(_interpret_values(circuit, x, genome, None))

            return fallback
        return ns["_run"]

    def function_for(self, genome):
        if genome is None:
            return self._original
        key = genome.shape
        fn = self._cache.get(key)
        if fn is None:
            if len(self._cache) >= self.cache_size:
                self._cache.pop(next(iter(self._cache)))
            fn = self._cache[key] = self._build(genome)
        return fn

    def run(self, x: tuple, genome=None) -> ExecutionTrace:
        """Execute on canonical inputs ``x`` (a tuple of ints, not validated)."""
        fn = self.function_for(genome)
        try:
            values = fn(x, genome.constants if genome is not None else ())
        except _Abort as a:
            return ExecutionTrace(x, None, a.reason, self.n, self.k)
        return ExecutionTrace(x, values, None, self.n, self.k)


def executor_for(circuit: CompiledCircuit) -> Executor:
    ex = circuit.__dict__.get("_executor")
    if ex is None:
        ex = Executor(circuit)
        object.__setattr__(circuit, "_executor", ex)
    return ex


def execute(circuit: CompiledCircuit, x, mutant=None) -> ExecutionTrace:
    """Run the original program, or ``mutant`` when given, on input vector ``x``."""
    return executor_for(circuit).run(_normalise_inputs(circuit, x), mutant)
