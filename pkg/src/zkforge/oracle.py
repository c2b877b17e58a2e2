"""Exhaustive trace-constraint consistency check for small fields.

Enumerates every non-aborting execution trace and every assignment accepted
by the constraints, then compares them: the constraints are
under-constrained when they accept an (input, output) pair no execution
produces, and over-constrained when they reject a trace the program does
produce.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .compiler import CompiledCircuit
from .executor import interpret

DEFAULT_BUDGET = 10 ** 6
WITNESS_CAP = 10


class BudgetExceeded(ValueError):
    """The enumeration would need more points than the budget allows."""

    def __init__(self, what: str, points: int, budget: int):
        super().__init__(f"enumerating {what} needs {points} points, budget is {budget}")
        self.points = points
        self.budget = budget


def _split(circuit: CompiledCircuit, values: tuple) -> tuple:
    n, k = circuit.n, circuit.k
    return (tuple(values[:n]), tuple(values[n:n + k]), tuple(values[n + k:]))


def enumerate_trace_set(circuit: CompiledCircuit, budget: int = DEFAULT_BUDGET) -> set:
    """All (x, z, y) produced by non-aborting runs, over every input."""
    q = circuit.field.modulus
    points = q ** circuit.n
    if points > budget:
        raise BudgetExceeded("the trace set", points, budget)
    traces = set()
    for x in itertools.product(range(q), repeat=circuit.n):
        t = interpret(circuit, x)
        if t.ok:
            traces.add(_split(circuit, t.values))
    return traces


def enumerate_satisfaction_set(circuit: CompiledCircuit, budget: int = DEFAULT_BUDGET) -> set:
    """All (x, z, y) on which every constraint polynomial vanishes.

    Assignments are built slot by slot; each constraint is checked as soon
    as the highest slot it mentions is fixed, which prunes dead branches
    without changing the result.
    """
    q = circuit.field.modulus
    width = circuit.n + circuit.k + circuit.m
    points = q ** width
    if points > budget:
        raise BudgetExceeded("the satisfaction set", points, budget)
    by_level: list = [[] for _ in range(width)]
    for c in circuit.constraints:
        slots = c.poly.slots()
        if not slots:
            if c.poly.evaluate(()) != 0:
                return set()
            continue
        by_level[max(slots)].append(c.poly)
    accepted = set()
    values = [0] * width

    def extend(level: int):
        if level == width:
            accepted.add(_split(circuit, tuple(values)))
            return
        checks = by_level[level]
        for v in range(q):
            values[level] = v
            if all(p.evaluate(values) == 0 for p in checks):
                extend(level + 1)

    if width == 0:
        accepted.add(((), (), ()))
    else:
        extend(0)
    return accepted


@dataclass
class TcctVerdict:
    under_constrained: bool
    over_constrained: bool
    under_witnesses: list = dc_field(default_factory=list)  # (x, y) pairs
    over_witnesses: list = dc_field(default_factory=list)   # (x, z, y) traces
    trace_set: set | None = None
    satisfaction_set: set | None = None

    @property
    def well_constrained(self) -> bool:
        return not (self.under_constrained or self.over_constrained)

    @property
    def label(self) -> str:
        if self.well_constrained:
            return "well-constrained"
        parts = []
        if self.under_constrained:
            parts.append("under-constrained")
        if self.over_constrained:
            parts.append("over-constrained")
        return " and ".join(parts)

    def to_json(self) -> dict:
        def nums(t):
            return [[str(v) for v in part] for part in t]

        return {
            "schema": 1,
            "verdict": self.label,
            "under_constrained": self.under_constrained,
            "over_constrained": self.over_constrained,
            "under_witnesses": [nums(w) for w in self.under_witnesses],
            "over_witnesses": [nums(w) for w in self.over_witnesses],
        }


def project_xy(tuples) -> set:
    return {(x, y) for x, _, y in tuples}


def decide(circuit: CompiledCircuit, budget: int = DEFAULT_BUDGET, keep_sets: bool = True,
           witness_cap: int = WITNESS_CAP) -> TcctVerdict:
    traces = enumerate_trace_set(circuit, budget)
    accepted = enumerate_satisfaction_set(circuit, budget)
    under = sorted(project_xy(accepted) - project_xy(traces))
    over = sorted(traces - accepted)
    return TcctVerdict(
        under_constrained=bool(under),
        over_constrained=bool(over),
        under_witnesses=under[:witness_cap],
        over_witnesses=over[:witness_cap],
        trace_set=traces if keep_sets else None,
        satisfaction_set=accepted if keep_sets else None,
    )


def _cells(t) -> list:
    if t is None:
        return ["-", "-", "-"]
    return [",".join(str(v) for v in part) if part else "()" for part in t]


def table_rows(traces: set, accepted: set) -> list:
    """Side-by-side rows grouped by input: tuples present in both sets share
    a row, the remaining ones of each side are paired in sorted order and
    missing cells are None."""
    rows = []
    for x in sorted({t[0] for t in traces} | {t[0] for t in accepted}):
        left = sorted(t for t in traces if t[0] == x)
        right = sorted(t for t in accepted if t[0] == x)
        group = [(t, t) for t in left if t in accepted]
        only_left = [t for t in left if t not in accepted]
        only_right = [t for t in right if t not in traces]
        group += list(itertools.zip_longest(only_left, only_right))
        group.sort(key=lambda pair: pair[1] if pair[1] is not None else pair[0])
        rows.extend(group)
    return rows


def format_tables(traces: set, accepted: set) -> str:
    body = [_cells(a) + _cells(b) for a, b in table_rows(traces, accepted)]
    grid = [["x", "z", "y", "x", "z", "y"]] + body
    widths = [max(len(r[i]) for r in grid) for i in range(6)]

    def line(r):
        left = " ".join(r[i].rjust(widths[i]) for i in range(3))
        right = " ".join(r[i].rjust(widths[i]) for i in range(3, 6))
        return f"{left} | {right}"

    return "\n".join(line(r) for r in grid) + "\n"
