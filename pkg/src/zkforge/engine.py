"""The fuzzing loop: sample inputs, evolve mutants, look for trace/constraint
inconsistencies and emit re-checked bug reports."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field as dc_field

from .compiler import CompiledCircuit
from .executor import ExecutionTrace, executor_for, interpret
from .fitness import INF, ConstraintEvaluator, constraint_error, outputs_differ, satisfies
from .mutation import (
    DEFAULT_WHITELIST, IDENTITY, MODES, MutantGenome, MutationParams, Roulette, crossover,
    enumerate_sites, random_mutant,
)
from .selectors import (
    ArrayGuardState, SkewedSampler, find_hash_check_targets, find_zero_div_targets,
    observe_abort, patch_hash_check, sample_input, solve_zero,
)

UNDER = "under-constrained"
OVER = "over-constrained"
DETECT_MODES = ("under", "over", "both")
REPORT_SCHEMA = 1
_ORIGINAL_CACHE_LIMIT = 200_000


@dataclass(frozen=True)
class FuzzConfig:
    max_generations: int = 50_000
    timeout_secs: float = 7200.0
    population_size: int = 30
    mutation_prob: float = 0.3
    crossover_prob: float = 0.5
    op_sub_prob: float = 0.1
    zero_div_prob: float = 0.2
    hash_check_prob: float = 0.2
    mode: str = "pp"
    detect: str = "both"
    whitelist: frozenset = DEFAULT_WHITELIST
    seed: int = 0
    exhaustive: bool = False
    extra_operators: bool = False
    guard_threshold: int = 8

    def __post_init__(self):
        for name in ("mutation_prob", "crossover_prob", "op_sub_prob", "zero_div_prob", "hash_check_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.population_size < 1 or self.max_generations < 0:
            raise ValueError("population size must be >= 1 and max generations >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.detect not in DETECT_MODES:
            raise ValueError(f"detect must be one of {DETECT_MODES}")
        object.__setattr__(self, "whitelist", frozenset(self.whitelist))

    @property
    def inputs_per_generation(self) -> int:
        return self.population_size


@dataclass
class BugReport:
    verdict: str
    input: tuple
    original: ExecutionTrace
    mutated: ExecutionTrace | None
    genome: MutantGenome | None
    generation: int
    elapsed: float
    circuit: str

    def to_json(self, circuit: CompiledCircuit | None = None) -> dict:
        d = {
            "schema": REPORT_SCHEMA,
            "verdict": self.verdict,
            "circuit": self.circuit,
            "generation": self.generation,
            "input": [str(v) for v in self.input],
            "original": self.original.to_json(),
        }
        if circuit is not None:
            d["prime"] = str(circuit.field.modulus)
            d["input_names"] = list(circuit.layout.names[:circuit.n])
        if self.mutated is not None:
            d["mutated"] = self.mutated.to_json()
        if self.genome is not None:
            d["genome"] = self.genome.to_json()
        return d


@dataclass
class FuzzStats:
    generations: int = 0
    executions: int = 0
    wall_time: float = 0.0
    under_reports: int = 0
    over_reports: int = 0
    stop_reason: str = ""
    sites: int = 0

    def to_json(self) -> dict:
        return {"stats": asdict(self)}


@dataclass
class FuzzResult:
    reports: list = dc_field(default_factory=list)
    stats: FuzzStats = dc_field(default_factory=FuzzStats)


# -- independent re-checks -----------------------------------------------------------

def verify_report(circuit: CompiledCircuit, report: BugReport) -> bool:
    """Re-run the report with the reference interpreter and re-evaluate the
    constraints from their polynomials."""
    original = interpret(circuit, report.input)
    if original != report.original:
        return False
    if report.verdict == OVER:
        return original.ok and constraint_error(circuit, original) > 0
    if report.verdict != UNDER or report.genome is None:
        return False
    mutated = interpret(circuit, report.input, report.genome)
    return (mutated == report.mutated and mutated.ok and satisfies(circuit, mutated)
            and outputs_differ(original, mutated))


def verify_report_json(circuit: CompiledCircuit, obj: dict) -> bool:
    """Replay a serialised report from scratch."""
    x = tuple(int(v) for v in obj["input"])
    original = interpret(circuit, x)
    if original.to_json() != obj["original"]:
        return False
    if obj["verdict"] == OVER:
        return original.ok and constraint_error(circuit, original) > 0
    genome = MutantGenome.from_json(obj["genome"])
    mutated = interpret(circuit, x, genome)
    return (mutated.to_json() == obj["mutated"] and mutated.ok and satisfies(circuit, mutated)
            and outputs_differ(original, mutated))


def score_generation(circuit: CompiledCircuit, population, inputs, original_traces, run=None) -> list:
    """Pair each genome with its min-sum fitness over the inputs."""
    from .fitness import mutant_fitness

    return [(g, mutant_fitness(circuit, g, inputs, original_traces, run)) for g in population]


# -- main loop -----------------------------------------------------------------------

class _Fuzzer:
    def __init__(self, circuit: CompiledCircuit, config: FuzzConfig, on_report, clock):
        self.circuit = circuit
        self.config = config
        self.on_report = on_report
        self.clock = clock
        self.executor = executor_for(circuit)
        self.errors = ConstraintEvaluator(circuit)
        self.sites = enumerate_sites(circuit, config.whitelist, config.mode)
        self.sampler = SkewedSampler(circuit.field)
        self.params = MutationParams(config.mutation_prob, config.op_sub_prob, config.extra_operators)
        self.guard = ArrayGuardState.for_circuit(circuit, config.guard_threshold)
        self.zero_div = find_zero_div_targets(circuit) if config.zero_div_prob > 0 else []
        self.hash_checks = find_hash_check_targets(circuit) if config.hash_check_prob > 0 else []
        self.originals: dict = {}
        self.result = FuzzResult()
        self.seen: set = set()
        self.start = clock()
        self.under = config.detect in ("under", "both")
        self.over = config.detect in ("over", "both")

    def elapsed(self) -> float:
        return self.clock() - self.start

    def timed_out(self) -> bool:
        return self.elapsed() > self.config.timeout_secs

    def draw_value(self, rng) -> int:
        return self.sampler.draw(rng)

    def make_inputs(self, rng) -> list:
        cfg = self.config
        n = self.circuit.n
        inputs = []
        for _ in range(cfg.inputs_per_generation):
            x = sample_input(self.sampler, n, self.guard, rng)
            if self.zero_div and rng.random() < cfg.zero_div_prob:
                target = self.zero_div[rng.randrange(len(self.zero_div))]
                variables = target.variables()
                var = variables[rng.randrange(len(variables))]
                root = solve_zero(target, x, self.circuit.field, var)
                if root is not None:
                    x = x[:var] + (root,) + x[var + 1:]
            if self.hash_checks:
                patch = patch_hash_check(self.circuit, x, rng, cfg.hash_check_prob, self.hash_checks)
                if patch:
                    xs = list(x)
                    for slot, v in patch.items():
                        xs[slot] = v
                    x = tuple(xs)
            inputs.append(x)
        return inputs

    def make_population(self, rng, scored) -> list:
        cfg = self.config
        size = cfg.population_size
        if not self.sites:
            return [IDENTITY] * size
        if scored is None:
            return [random_mutant(self.sites, rng, self.params, self.draw_value) for _ in range(size)]
        wheel = Roulette(scored)
        pop = []
        for _ in range(size):
            if rng.random() < cfg.crossover_prob:
                pop.append(crossover(wheel.select(rng), wheel.select(rng), rng))
            else:
                pop.append(random_mutant(self.sites, rng, self.params, self.draw_value))
        return pop

    def original(self, x) -> tuple:
        """(trace, constraint error or None) for the unmutated program."""
        hit = self.originals.get(x)
        if hit is None:
            if len(self.originals) >= _ORIGINAL_CACHE_LIMIT:
                self.originals.clear()
            t = self.executor.run(x)
            self.result.stats.executions += 1
            hit = self.originals[x] = (t, self.errors.error(t.values) if t.ok and self.over else None)
        return hit

    def emit(self, report: BugReport) -> bool:
        if not verify_report(self.circuit, report):
            return False
        # over reports carry no genome, so distinct rejected inputs count separately
        key = (report.verdict, report.input if report.genome is None else report.genome.sites())
        if self.config.exhaustive and key in self.seen:
            return False
        self.seen.add(key)
        self.result.reports.append(report)
        if report.verdict == UNDER:
            self.result.stats.under_reports += 1
        else:
            self.result.stats.over_reports += 1
        if self.on_report is not None:
            self.on_report(report)
        return True

    def generation(self, gen: int, scored):
        cfg = self.config
        rng = random.Random(f"{cfg.seed}:{gen}")
        inputs = self.make_inputs(rng)
        population = self.make_population(rng, scored)
        unique_inputs = list(dict.fromkeys(inputs))
        checked = [self.original(x) for x in unique_inputs]
        originals = [t for t, _ in checked]
        found = False
        if self.over:
            for x, (o, over_err) in zip(unique_inputs, checked):
                if over_err:
                    if self.emit(BugReport(OVER, x, o, None, None, gen, self.elapsed(), self.circuit.name)):
                        found = True
                        if not cfg.exhaustive:
                            break
        scores: dict = {}
        run = self.executor.run
        err = self.errors.error
        under_done = not self.under
        for g in dict.fromkeys(population):
            if self.timed_out():
                break
            best = INF
            for x, o in zip(unique_inputs, originals):
                if not g and o.ok:
                    continue  # the identity mutant reproduces an ok original exactly
                t = run(x, g)
                self.result.stats.executions += 1
                if t.reason is not None:
                    self.guard = observe_abort(self.guard, t.reason)
                    continue
                if o.reason is None and o.values[o.n + o.k:] == t.values[t.n + t.k:]:
                    continue
                e = err(t.values)
                if e < best:
                    best = e
                if e == 0 and not under_done:
                    if self.emit(BugReport(UNDER, x, o, t, g, gen, self.elapsed(), self.circuit.name)):
                        found = True
                        under_done = not cfg.exhaustive
            scores[g] = best
        scored = [(g, scores.get(g, INF)) for g in population]
        return scored, found

    def run(self) -> FuzzResult:
        cfg = self.config
        stats = self.result.stats
        stats.sites = len(self.sites)
        scored = None
        stats.stop_reason = "max-generations"
        for gen in range(cfg.max_generations):
            if self.timed_out():
                stats.stop_reason = "timeout"
                break
            scored, found = self.generation(gen, scored)
            stats.generations = gen + 1
            if found and not cfg.exhaustive:
                stats.stop_reason = "bug-found"
                break
        stats.wall_time = self.elapsed()
        return self.result


def fuzz(circuit: CompiledCircuit, config: FuzzConfig = FuzzConfig(), on_report=None,
         clock=time.monotonic) -> FuzzResult:
    """Run the fuzz loop until a bug is confirmed, the generation cap is hit
    or the wall-clock budget runs out."""
    return _Fuzzer(circuit, config, on_report, clock).run()
