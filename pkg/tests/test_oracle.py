import itertools
import json

import pytest

from zkforge.engine import OVER, UNDER, FuzzConfig, fuzz
from zkforge.oracle import (
    BudgetExceeded, decide, enumerate_satisfaction_set, enumerate_trace_set, format_tables, project_xy,
)

from conftest import build, load


def triples(rows):
    return {((x,), (z,), (y,)) for x, z, y in rows}


ISZERO_TABLE = """\
x z y | x z y
0 0 1 | 0 0 1
- - - | 0 1 1
- - - | 0 2 1
1 1 0 | 1 1 0
2 2 0 | 2 2 0
"""

SPLITREWARD_TABLE = """\
x z y | x z y
0 0 1 | 0 0 1
1 0 1 | 1 3 4
2 1 2 | 2 1 2
3 1 2 | 3 4 0
4 2 3 | 4 2 3
"""


def test_iszero_sets():
    c = load("iszero", 3)
    assert enumerate_trace_set(c) == triples([(0, 0, 1), (1, 1, 0), (2, 2, 0)])
    s = enumerate_satisfaction_set(c)
    assert len(s) == 5 and triples([(0, 1, 1), (0, 2, 1)]) <= s


def test_splitreward_sets():
    c = load("splitreward", 5, assert_disabled=True)
    assert enumerate_trace_set(c) == triples([(0, 0, 1), (1, 0, 1), (2, 1, 2), (3, 1, 2), (4, 2, 3)])
    assert triples([(1, 3, 4), (3, 4, 0)]) <= enumerate_satisfaction_set(c)


def test_transfer_trace_set_filters_aborts():
    q = 5
    c = load("transfer", q)

    def signed(v):
        return v if v <= (q - 1) // 2 else v - q

    want = {((fb, tb, amt), (), ((fb - amt) % q, (tb + amt) % q))
            for fb, tb, amt in itertools.product(range(q), repeat=3) if signed((fb - amt) % q) >= 0}
    assert enumerate_trace_set(c) == want


def test_unsatisfiable_constraint_gives_empty_set():
    c = build("template U() { signal input a; 0 === 1; }\ncomponent main = U();", 5, assert_disabled=True)
    assert enumerate_satisfaction_set(c) == set()


def test_pruned_enumeration_matches_naive_product():
    for name, q, flag in [("iszero", 5, False), ("rshift1_uc", 7, False), ("splitreward", 5, True),
                          ("uc_iszero", 7, False), ("zerodiv", 5, False)]:
        c = load(name, q, flag)
        width = c.n + c.k + c.m
        naive = set()
        for v in itertools.product(range(q), repeat=width):
            if all(con.poly.evaluate(v) == 0 for con in c.constraints):
                naive.add((v[:c.n], v[c.n:c.n + c.k], v[c.n + c.k:]))
        assert enumerate_satisfaction_set(c) == naive, name


def test_decide_examples():
    assert decide(load("iszero", 3)).well_constrained
    uc = decide(load("rshift1_uc", 11))
    assert uc.under_constrained and not uc.over_constrained
    assert ((7,), (9,)) in uc.under_witnesses
    sr = decide(load("splitreward", 5, assert_disabled=True))
    assert sr.under_constrained and sr.over_constrained
    assert ((1,), (0,), (1,)) in sr.over_witnesses


def test_oc_rshift1_rejects_a_valid_trace():
    v = decide(load("rshift1_oc", 11, assert_disabled=True))
    assert v.over_constrained
    assert ((3,), (1,), (1,)) in v.over_witnesses  # x, b, y


def test_transfer_is_under_constrained_through_aborts():
    v = decide(load("transfer", 7))
    assert v.under_constrained and not v.over_constrained
    # every witness input is one the program refuses
    for x, _ in v.under_witnesses:
        fb, _, amt = x
        assert (fb - amt) % 7 > 3


def test_witness_cap():
    v = decide(load("rshift1_uc", 11), witness_cap=3)
    assert len(v.under_witnesses) == 3
    assert len(decide(load("rshift1_uc", 11)).under_witnesses) == 10


def test_verdict_flags_match_set_relations():
    for name, q, flag in [("iszero", 3, False), ("uc_iszero", 5, False), ("rshift1_uc", 11, False),
                          ("splitreward", 5, True), ("splitreward", 5, False), ("transfer", 5, False)]:
        v = decide(load(name, q, flag))
        t, s = v.trace_set, v.satisfaction_set
        eq3 = t <= s and project_xy(t) == project_xy(s)
        assert v.well_constrained == eq3, name


def test_budget_refusal_reports_estimate():
    with pytest.raises(BudgetExceeded) as err:
        decide(load("rshift1_correct", 11))
    assert err.value.points == 11 ** 18
    with pytest.raises(BudgetExceeded):
        enumerate_trace_set(load("transfer", 11), budget=100)


def test_tables_byte_match():
    v = decide(load("iszero", 3))
    assert format_tables(v.trace_set, v.satisfaction_set) == ISZERO_TABLE
    v = decide(load("splitreward", 5, assert_disabled=True))
    assert format_tables(v.trace_set, v.satisfaction_set) == SPLITREWARD_TABLE


def test_verdict_json():
    obj = decide(load("splitreward", 5, assert_disabled=True)).to_json()
    assert obj["verdict"] == "under-constrained and over-constrained"
    assert json.loads(json.dumps(obj)) == obj


@pytest.mark.parametrize("name, q, flag", [
    ("rshift1_uc", 11, False), ("transfer", 5, False), ("splitreward", 5, True), ("uc_iszero", 11, False),
    ("zerodiv", 7, False), ("rshift1_oc", 11, True), ("iszero", 11, False),
])
def test_engine_reports_imply_oracle_flags(name, q, flag):
    c = load(name, q, flag)
    verdict = decide(c, keep_sets=False)
    for seed in range(3):
        for r in fuzz(c, FuzzConfig(seed=seed, max_generations=300, exhaustive=True)).reports:
            if r.verdict == UNDER:
                assert verdict.under_constrained
            if r.verdict == OVER:
                assert verdict.over_constrained
