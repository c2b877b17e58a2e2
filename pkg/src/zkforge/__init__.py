"""Find under- and over-constrained arithmetic circuits by comparing what a
program computes with what its constraints accept."""

from .compiler import CompileError, CompileFlags, CompiledCircuit, compile_file, compile_source
from .engine import BugReport, FuzzConfig, FuzzResult, fuzz, verify_report
from .executor import ExecutionTrace, execute, interpret
from .field import BN254_PRIME, PrimeField
from .oracle import TcctVerdict, decide, enumerate_satisfaction_set, enumerate_trace_set, format_tables

__version__ = "0.1.0"

__all__ = [
    "BN254_PRIME", "BugReport", "CompileError", "CompileFlags", "CompiledCircuit", "ExecutionTrace",
    "FuzzConfig", "FuzzResult", "PrimeField", "TcctVerdict", "compile_file", "compile_source",
    "decide", "enumerate_satisfaction_set", "enumerate_trace_set", "execute", "format_tables",
    "fuzz", "interpret", "verify_report",
]
