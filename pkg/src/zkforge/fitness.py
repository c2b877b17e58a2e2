"""Constraint satisfaction and the min-sum error used to rank mutants."""

from __future__ import annotations

import math

from .compiler import CompiledCircuit

INF = math.inf


class UsageError(ValueError):
    pass


def _constraints_of(obj):
    return obj.constraints if isinstance(obj, CompiledCircuit) else obj


def _values_of(trace):
    if not trace.ok:
        raise UsageError("constraints are only evaluated on non-aborting traces")
    return trace.values


def satisfies(constraints, trace) -> bool:
    """True iff every constraint polynomial vanishes on the trace."""
    values = _values_of(trace)
    return all(c.poly.evaluate(values) == 0 for c in _constraints_of(constraints))


def cyclic_distance(d: int, q: int) -> int:
    return min(d, q - d)


def constraint_error(constraints, trace) -> int:
    """Sum over constraints of the cyclic distance of lhs - rhs from 0."""
    values = _values_of(trace)
    total = 0
    for c in _constraints_of(constraints):
        total += cyclic_distance(c.poly.evaluate(values), c.poly.modulus)
    return total


def outputs_differ(original, mutant) -> bool:
    """Divergence on outputs only; an aborted original differs from any ok mutant."""
    return mutant.ok and (not original.ok or original.y != mutant.y)


def mutant_fitness(circuit: CompiledCircuit, mutant, inputs, original_traces, run=None):
    """Minimum error over inputs whose mutant trace is ok and diverges from
    the original; INF when no input qualifies.

    ``run(x, genome)`` defaults to the compiled executor.
    """
    if not inputs:
        raise UsageError("mutant_fitness needs at least one input")
    if len(inputs) != len(original_traces):
        raise UsageError("inputs and original traces are not aligned")
    if run is None:
        from .executor import executor_for

        run = executor_for(circuit).run
    best = INF
    for x, orig in zip(inputs, original_traces):
        trace = run(tuple(x), mutant)
        if outputs_differ(orig, trace):
            best = min(best, constraint_error(circuit, trace))
    return best


class ConstraintEvaluator:
    """Generated-code version of ``constraint_error`` for the fuzz loop."""

    def __init__(self, circuit: CompiledCircuit):
        q = circuit.field.modulus
        lines = ["def _err(v):", "    e = 0"]
        for c in circuit.constraints:
            terms = []
            for mono, coeff in c.poly.terms.items():
                terms.append("*".join([str(coeff)] + [f"v[{s}]" for s in mono]))
            if not terms:
                continue
            lines.append("    t = 0")
            for j in range(0, len(terms), 32):
                lines.append("    t += " + " + ".join(terms[j:j + 32]))
            lines.append("    t %= Q")
            lines.append("    if t:")
            lines.append("        e += t if t <= H else Q - t")
        lines.append("    return e")
        ns = {"Q": q, "H": q // 2}
        exec(compile("\n".join(lines) + "\n", f"<zkforge-constraints:{circuit.name}>", "exec"), ns)
        self.error = ns["_err"]

    def satisfied(self, values) -> bool:
        return self.error(values) == 0
