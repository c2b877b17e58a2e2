"""Program mutants: sites, actions, genomes and the genetic operators."""

from __future__ import annotations

import bisect
import math
from collections.abc import Mapping
from dataclasses import dataclass

from .compiler import CompiledCircuit
from .ir import binary_ops, op_category

DEFAULT_WHITELIST = frozenset({"IsZero", "Num2Bits"})
MODES = ("core", "pp")

SCORE_CAP = 2 ** 64
_WEIGHT_SCALE = 1 << 256


@dataclass(frozen=True, order=True)
class MutationSite:
    """``kind`` is "rhs" (the whole right-hand side) or "op" (one binary
    operator, addressed by its preorder position in the right-hand side)."""

    instruction: int
    kind: str
    op_index: int = -1
    operator: str = ""

    def to_json(self) -> dict:
        d = {"instruction": self.instruction, "kind": self.kind}
        if self.kind == "op":
            d["op_index"] = self.op_index
            d["operator"] = self.operator
        return d

    @classmethod
    def from_json(cls, d: dict) -> "MutationSite":
        return cls(d["instruction"], d["kind"], d.get("op_index", -1), d.get("operator", ""))


@dataclass(frozen=True)
class ReplaceConstant:
    value: int

    def to_json(self) -> dict:
        return {"action": "constant", "value": str(self.value)}


@dataclass(frozen=True)
class SubstituteOperator:
    original: str
    replacement: str

    def to_json(self) -> dict:
        return {"action": "operator", "from": self.original, "to": self.replacement}


@dataclass(frozen=True)
class AddConstant:
    """Optional operator: right-hand side plus a constant."""

    value: int

    def to_json(self) -> dict:
        return {"action": "add", "value": str(self.value)}


@dataclass(frozen=True)
class DeleteStatement:
    """Optional operator: drop the assignment so the signal reads as 0."""

    def to_json(self) -> dict:
        return {"action": "delete"}


def action_from_json(d: dict):
    kind = d["action"]
    if kind == "constant":
        return ReplaceConstant(int(d["value"]))
    if kind == "operator":
        return SubstituteOperator(d["from"], d["to"])
    if kind == "add":
        return AddConstant(int(d["value"]))
    if kind == "delete":
        return DeleteStatement()
    raise ValueError(f"unknown action {kind!r}")


class MutantGenome(Mapping):
    """Immutable map from sites to actions; the empty genome is the identity.

    ``plan`` maps an instruction index to how the executor rewrites it:
    ("const", k) uses ``constants[k]``, ("add", k) adds ``constants[k]``,
    ("delete",) stores 0 and ("ops", {op_index: op}) swaps operators.
    A whole-right-hand-side action takes precedence over operator swaps on
    the same instruction. ``shape`` identifies the generated code, so
    genomes that differ only in constants share one compiled function.
    """

    __slots__ = ("_items", "_map", "_hash", "plan", "shape", "constants")

    def __init__(self, actions: Mapping | None = None):
        items = tuple(sorted((actions or {}).items(), key=lambda kv: kv[0]))
        self._items = items
        self._map = dict(items)
        self._hash = hash(items)
        whole: dict = {}
        ops: dict = {}
        for site, action in items:
            if site.kind == "rhs":
                whole[site.instruction] = action
            else:
                ops.setdefault(site.instruction, {})[site.op_index] = action.replacement
        plan, shape, constants = {}, [], []
        for instr in sorted(set(whole) | set(ops)):
            action = whole.get(instr)
            if isinstance(action, (ReplaceConstant, AddConstant)):
                tag = "const" if isinstance(action, ReplaceConstant) else "add"
                plan[instr] = (tag, len(constants))
                constants.append(action.value)
                shape.append((instr, tag))
            elif isinstance(action, DeleteStatement):
                plan[instr] = ("delete",)
                shape.append((instr, "delete"))
            else:
                plan[instr] = ("ops", ops[instr])
                shape.append((instr, tuple(sorted(ops[instr].items()))))
        self.plan = plan
        self.shape = tuple(shape)
        self.constants = tuple(constants)

    def __getitem__(self, site):
        return self._map[site]

    def __iter__(self):
        return (s for s, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, MutantGenome):
            return self._items == other._items
        return NotImplemented

    def __repr__(self):
        return f"MutantGenome({dict(self._items)!r})"

    def sites(self) -> frozenset:
        return frozenset(self._map)

    def to_json(self) -> list:
        return [{"site": s.to_json(), **a.to_json()} for s, a in self._items]

    @classmethod
    def from_json(cls, entries: list) -> "MutantGenome":
        return cls({MutationSite.from_json(e["site"]): action_from_json(e) for e in entries})


IDENTITY = MutantGenome()


@dataclass(frozen=True)
class MutationParams:
    mutation_prob: float = 0.3
    op_sub_prob: float = 0.1
    extra_operators: bool = False  # add-constant and delete-statement


def enumerate_sites(circuit: CompiledCircuit, whitelist=DEFAULT_WHITELIST, mode: str = "pp") -> list:
    """Mutable sites outside whitelisted templates.

    In "pp" mode only weak assignments are candidates; "core" mode also
    mutates strong assignments. An instruction is skipped when any template
    on its instance path (main included) is whitelisted.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    whitelist = frozenset(whitelist)
    sites = []
    for idx, ins in enumerate(circuit.instructions):
        if not ins.is_assignment:
            continue
        if mode == "pp" and ins.kind != "weak":
            continue
        if whitelist.intersection(ins.templates):
            continue
        sites.append(MutationSite(idx, "rhs"))
        for j, node in enumerate(binary_ops(ins.expr)):
            if op_category(node.op) is not None:
                sites.append(MutationSite(idx, "op", j, node.op))
    return sites


def random_mutant(sites, rng, params: MutationParams = MutationParams(), draw_value=None) -> MutantGenome:
    """Select each right-hand side with ``mutation_prob``; a selected one
    gets an operator swap with ``op_sub_prob`` when it has operators, and a
    constant from ``draw_value(rng)`` otherwise."""
    if not sites or params.mutation_prob <= 0:
        return IDENTITY
    if draw_value is None:
        raise ValueError("draw_value is required to sample constants")
    ops_by_instr: dict = {}
    for s in sites:
        if s.kind == "op":
            ops_by_instr.setdefault(s.instruction, []).append(s)
    actions = {}
    for s in sites:
        if s.kind != "rhs" or rng.random() >= params.mutation_prob:
            continue
        candidates = ops_by_instr.get(s.instruction)
        if candidates and rng.random() < params.op_sub_prob:
            site = candidates[rng.randrange(len(candidates))]
            choices = [o for o in op_category(site.operator) if o != site.operator]
            actions[site] = SubstituteOperator(site.operator, choices[rng.randrange(len(choices))])
        elif params.extra_operators:
            r = rng.random()
            if r < 1 / 3:
                actions[s] = AddConstant(draw_value(rng))
            elif r < 2 / 3:
                actions[s] = DeleteStatement()
            else:
                actions[s] = ReplaceConstant(draw_value(rng))
        else:
            actions[s] = ReplaceConstant(draw_value(rng))
    return MutantGenome(actions) if actions else IDENTITY


def crossover(a: MutantGenome, b: MutantGenome, rng) -> MutantGenome:
    """Union of both maps; a site present in both takes either parent's
    action with equal probability."""
    if not b:
        return a
    if not a:
        return b
    merged = {}
    for site in sorted(a.sites() | b.sites()):
        if site in a and site in b:
            merged[site] = a[site] if rng.random() < 0.5 else b[site]
        else:
            merged[site] = a[site] if site in a else b[site]
    return MutantGenome(merged)


def selection_weight(score) -> int:
    """Integer weight proportional to 1 / (1 + min(score, 2^64)); an
    infinite score gets 1 / (2 + 2^64), below every finite score."""
    if score == math.inf:
        return _WEIGHT_SCALE // (2 + SCORE_CAP)
    return _WEIGHT_SCALE // (1 + min(int(score), SCORE_CAP))


class Roulette:
    """Fitness-proportional sampler over a scored population."""

    def __init__(self, population):
        if not population:
            raise ValueError("roulette selection needs a non-empty population")
        self.genomes = [g for g, _ in population]
        total, cumulative = 0, []
        for _, score in population:
            total += selection_weight(score)
            cumulative.append(total)
        self.cumulative = cumulative
        self.total = total

    def select(self, rng) -> MutantGenome:
        r = rng.randrange(self.total)
        return self.genomes[bisect.bisect_right(self.cumulative, r)]


def roulette_select(population, rng) -> MutantGenome:
    return Roulette(population).select(rng)
