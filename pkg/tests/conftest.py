from pathlib import Path

import pytest

from zkforge.compiler import CompileFlags, compile_file, compile_source
from zkforge.field import BN254_PRIME, PrimeField

CIRCUITS = Path(__file__).resolve().parents[1] / "src" / "zkforge" / "circuits"


def load(name: str, q: int = BN254_PRIME, assert_disabled: bool = False):
    return compile_file(CIRCUITS / f"{name}.zkc", PrimeField(q),
                        CompileFlags(constraint_assert_disabled=assert_disabled))


def build(text: str, q: int = BN254_PRIME, assert_disabled: bool = False):
    return compile_source(text, PrimeField(q), CompileFlags(constraint_assert_disabled=assert_disabled))


@pytest.fixture
def circuits_dir():
    return CIRCUITS


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
