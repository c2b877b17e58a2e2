"""Command-line entry point: ``zkforge {compile,run,fuzz,oracle} FILE``.

Exit status is 0 on success with no bug, 2 when a bug is reported and 1 on
usage, parse or compile errors. Machine-readable output goes to stdout;
statistics and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import compiler
from .compiler import CompileError, CompileFlags
from .engine import UNDER, FuzzConfig, fuzz
from .executor import ExecutionBudgetExceeded, execute
from .field import FieldError, PrimeField
from .frontend import ParseError
from .mutation import DEFAULT_WHITELIST
from .oracle import BudgetExceeded, decide, format_tables, table_rows

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUG = 2

FIXTURE_DIR = Path(__file__).parent / "circuits"
FIXTURE_ALIASES = {"rshift1": "rshift1_uc"}

_DEFAULTS = FuzzConfig()


class CliError(Exception):
    pass


def resolve_source(name: str) -> Path:
    """A path on disk, or the name of a bundled fixture (suffix optional)."""
    path = Path(name)
    if path.is_file():
        return path
    stem = path.name[:-4] if path.name.endswith(".zkc") else path.name
    stem = FIXTURE_ALIASES.get(stem, stem)
    bundled = FIXTURE_DIR / f"{stem}.zkc"
    if bundled.is_file():
        return bundled
    raise CliError(f"no such file: {name}")


def worker_count() -> int:
    """Worker cap from ZKFORGE_THREADS; defaults to the available cores."""
    raw = os.environ.get("ZKFORGE_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"ZKFORGE_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise CliError(f"ZKFORGE_THREADS must be a positive integer, got {raw!r}")
    return value


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must be in [0, 1], got {text}")
    return p


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("source", help="circuit file or bundled fixture name")
    common.add_argument("--prime", default="bn254", help="field modulus in decimal, or 'bn254'")
    common.add_argument("--constraint-assert-disabled", action="store_true",
                        help="do not check '===' at runtime")
    common.add_argument("--format", choices=("human", "json"), default="human")

    parser = argparse.ArgumentParser(prog="zkforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("compile", parents=[common], help="print the lowered program and constraints")

    run = sub.add_parser("run", parents=[common], help="execute on concrete inputs")
    run.add_argument("inputs", nargs="*", help="input values in main-signal order")

    fz = sub.add_parser("fuzz", parents=[common], help="search for inconsistencies by mutation")
    fz.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    fz.add_argument("--max-generations", type=_non_negative, default=_DEFAULTS.max_generations)
    fz.add_argument("--timeout-secs", type=float, default=_DEFAULTS.timeout_secs)
    fz.add_argument("--population", type=_positive, default=_DEFAULTS.population_size)
    fz.add_argument("--mutation-prob", type=_probability, default=_DEFAULTS.mutation_prob)
    fz.add_argument("--crossover-prob", type=_probability, default=_DEFAULTS.crossover_prob)
    fz.add_argument("--op-sub-prob", type=_probability, default=_DEFAULTS.op_sub_prob)
    fz.add_argument("--zero-div-prob", type=_probability, default=_DEFAULTS.zero_div_prob)
    fz.add_argument("--hash-check-prob", type=_probability, default=_DEFAULTS.hash_check_prob)
    fz.add_argument("--mode", choices=("core", "pp"), default=_DEFAULTS.mode)
    fz.add_argument("--detect", choices=("under", "over", "both"), default=_DEFAULTS.detect)
    fz.add_argument("--whitelist", default=",".join(sorted(DEFAULT_WHITELIST)),
                    help="comma-separated template names never mutated")
    fz.add_argument("--exhaustive", action="store_true", help="keep going after the first bug")

    orc = sub.add_parser("oracle", parents=[common], help="decide by exhaustive enumeration")
    orc.add_argument("--tables", action="store_true", help="print both sets side by side")
    return parser


def _load(args):
    field = PrimeField.from_spec(args.prime)
    flags = CompileFlags(constraint_assert_disabled=args.constraint_assert_disabled)
    path = resolve_source(args.source)
    return path, compiler.compile_file(path, field, flags)


def _emit_json(obj, out):
    out.write(json.dumps(obj, sort_keys=True) + "\n")
    out.flush()


def cmd_compile(args, circuit, out, err) -> int:
    if args.format == "json":
        _emit_json(compiler.to_json(circuit), out)
    else:
        text = compiler.dump(circuit)
        out.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK


def cmd_run(args, circuit, out, err) -> int:
    try:
        x = [int(v, 0) for v in args.inputs]
    except ValueError as e:
        raise CliError(f"bad input value: {e}") from None
    if len(x) != circuit.n:
        raise CliError(f"{circuit.name} takes {circuit.n} inputs, got {len(x)}")
    trace = execute(circuit, x)
    if args.format == "json":
        obj = trace.to_json()
        obj["signals"] = list(circuit.layout.names)
        _emit_json(obj, out)
    elif trace.ok:
        for name, v in zip(circuit.layout.names, trace.values):
            out.write(f"{name} = {v}\n")
    else:
        out.write(f"abort: {trace.reason.kind} at instruction {trace.reason.instruction}\n")
    return EXIT_OK


def _describe(report, circuit) -> str:
    names = circuit.layout.names
    x = ", ".join(f"{names[i]}={v}" for i, v in enumerate(report.input))
    lines = [f"[{report.verdict}] generation {report.generation}: input {x}"]
    orig = report.original
    lines.append(f"  original: {'y=' + str(list(orig.y)) if orig.ok else 'abort (' + orig.reason.kind + ')'}")
    if report.verdict == UNDER:
        lines.append(f"  mutant accepted by the constraints: y={list(report.mutated.y)}")
        for site, action in report.genome.items():
            lines.append(f"    {json.dumps({'site': site.to_json(), **action.to_json()}, sort_keys=True)}")
    else:
        lines.append("  the constraints reject this trace")
    return "\n".join(lines) + "\n"


def cmd_fuzz(args, circuit, out, err) -> int:
    worker_count()
    whitelist = frozenset(w.strip() for w in args.whitelist.split(",") if w.strip())
    config = FuzzConfig(
        max_generations=args.max_generations,
        timeout_secs=args.timeout_secs,
        population_size=args.population,
        mutation_prob=args.mutation_prob,
        crossover_prob=args.crossover_prob,
        op_sub_prob=args.op_sub_prob,
        zero_div_prob=args.zero_div_prob,
        hash_check_prob=args.hash_check_prob,
        mode=args.mode,
        detect=args.detect,
        whitelist=whitelist,
        seed=args.seed,
        exhaustive=args.exhaustive,
    )

    def on_report(report):
        if args.format == "json":
            _emit_json(report.to_json(circuit), out)
        else:
            out.write(_describe(report, circuit))
            out.flush()

    result = fuzz(circuit, config, on_report=on_report)
    stats = result.stats
    if args.format == "json":
        _emit_json(stats.to_json(), err)
    else:
        err.write(f"{stats.generations} generations, {stats.executions} executions, "
                  f"{stats.wall_time:.2f}s, {stats.under_reports} under / {stats.over_reports} over, "
                  f"stopped: {stats.stop_reason}\n")
    return EXIT_BUG if result.reports else EXIT_OK


def cmd_oracle(args, circuit, out, err) -> int:
    verdict = decide(circuit)
    if args.format == "json":
        obj = verdict.to_json()
        if args.tables:
            obj["tables"] = [
                [None if t is None else [[str(v) for v in part] for part in t] for t in row]
                for row in table_rows(verdict.trace_set, verdict.satisfaction_set)
            ]
        _emit_json(obj, out)
    else:
        out.write(f"{circuit.name}: {verdict.label}\n")
        for x, y in verdict.under_witnesses:
            out.write(f"  accepted but never computed: x={list(x)} y={list(y)}\n")
        for x, z, y in verdict.over_witnesses:
            out.write(f"  computed but rejected: x={list(x)} z={list(z)} y={list(y)}\n")
        if args.tables:
            out.write(format_tables(verdict.trace_set, verdict.satisfaction_set))
    return EXIT_OK if verdict.well_constrained else EXIT_BUG


COMMANDS = {"compile": cmd_compile, "run": cmd_run, "fuzz": cmd_fuzz, "oracle": cmd_oracle}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # input values may follow the options of ``run``
        if extra and args.command == "run" and not any(v.startswith("--") for v in extra):
            args.inputs += extra
        elif extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        path, circuit = _load(args)
        return COMMANDS[args.command](args, circuit, out, err)
    except ParseError as e:
        err.write(e.format(str(args.source)) + "\n")
    except CompileError as e:
        err.write(e.format(str(args.source)) + "\n")
    except (CliError, FieldError, BudgetExceeded, ExecutionBudgetExceeded, ValueError, OSError) as e:
        err.write(f"zkforge: error: {e}\n")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
