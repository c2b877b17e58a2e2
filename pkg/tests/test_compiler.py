import itertools
import random

import pytest

from zkforge.compiler import CompileError, dump, dumps_json, format_instruction, to_json
from zkforge.executor import interpret
from zkforge.fitness import satisfies
from zkforge.ir import Poly

from conftest import build, load


def zero_set(polys, q, width):
    """Points of F_q^width where every polynomial vanishes."""
    return {p for p in itertools.product(range(q), repeat=width)
            if all(poly.evaluate(p) == 0 for poly in polys)}


def expected_polys(q, rows):
    return [Poly(terms, q) for terms in rows]


def test_iszero_lowering():
    c = load("iszero", 11)
    assert (c.n, c.k, c.m) == (1, 1, 1)
    assert [i.kind for i in c.instructions] == ["weak", "strong", "eq"]
    x, z, y = (c.layout.slot(f"main.{s}") for s in "xzy")
    # y = -x*z + 1 and x*y = 0
    want = expected_polys(11, [{(y,): 1, (x, z): 1, (): -1}, {(x, y): 1}])
    got = [con.poly for con in c.constraints]
    assert zero_set(got, 11, 3) == zero_set(want, 11, 3)
    assert all(zero_set([g], 11, 3) == zero_set([w], 11, 3) for g, w in zip(got, want))


def test_rshift1_constraints():
    c = load("rshift1_uc", 11)
    x, b, y = (c.layout.slot(f"main.{s}") for s in "xby")
    want = expected_polys(11, [{(b,): 1, (x,): -1, (y,): 2}, {(b,): 1, (b, b): -1}])
    got = [con.poly for con in c.constraints]
    assert all(zero_set([g], 11, 3) == zero_set([w], 11, 3) for g, w in zip(got, want))


def test_splitreward_flag_removes_runtime_check():
    on = load("splitreward", 5, assert_disabled=True)
    off = load("splitreward", 5)
    eq_on = [i for i in on.instructions if i.kind == "eq"]
    eq_off = [i for i in off.instructions if i.kind == "eq"]
    assert len(eq_on) == len(eq_off) == 1
    assert not eq_on[0].enforce and eq_off[0].enforce
    assert len(on.constraints) == 2
    # the disabled check lets x = 1 run to completion
    assert interpret(on, (1,)).ok and not interpret(off, (1,)).ok


def test_operator_semantics():
    c = build("""
template T() {
    signal input a;
    signal w;
    signal s;
    signal output o;
    w <-- a * 3;
    s <== a + 1;
    o <== s * s;
    assert(a != 7);
    o === s * s;
}
component main = T();
""", 11)
    kinds = [i.kind for i in c.instructions]
    assert kinds == ["weak", "strong", "strong", "assert", "eq"]
    assert len(c.constraints) == 3  # two strong assignments plus one equality


def test_vars_fold_into_constraints():
    c = build("""
template Scale(n) {
    signal input x[n];
    signal output y;
    var acc = 0;
    for (var i = 0; i < n; i++) {
        acc += x[i] * (i + 1);
    }
    y <== acc;
}
component main = Scale(3);
""", 101)
    assert (c.n, c.k, c.m) == (3, 0, 1)
    (con,) = c.constraints
    assert con.poly.degree == 1 and con.poly.slots() == {0, 1, 2, 3}
    t = interpret(c, (1, 2, 3))
    assert t.y == (1 + 4 + 9,)


def test_degree_three_is_rejected_with_position():
    src = "template T() {\n    signal input a;\n    signal output b;\n    b <== a*a*a;\n}\ncomponent main = T();\n"
    with pytest.raises(CompileError) as err:
        build(src, 11)
    assert err.value.span.line == 4
    assert "degree" in err.value.message


def test_unresolved_parameter_is_an_error():
    src = "template T(n) { signal input a[n]; signal output b; b <== a[0]; }\ncomponent main = T(m);"
    with pytest.raises(Exception):
        build(src, 11)


def test_empty_template_dump():
    c = build("template E() { }\ncomponent main = E();", 11)
    assert (c.n, c.k, c.m) == (0, 0, 0) and len(c.constraints) == 0
    text = dump(c)
    assert "n=0 k=0 m=0" in text and "constraints: 0" in text


def test_dump_reports_dimensions():
    text = dump(load("iszero", 11))
    assert "n=1 k=1 m=1" in text and "constraints: 2" in text


def test_dateencoder_constraint_statements_per_part():
    c = load("dateencoder")
    generating = [format_instruction(i, c.layout.names) for i in c.instructions if i.kind in ("strong", "eq")]
    for part in ("day", "month", "year"):
        assert sum(f"main.{part}D" in text for text in generating) == 2
    assert len(c.constraints) == 7
    assert (c.n, c.k, c.m) == (3, 9, 1)


def test_layout_is_role_partitioned():
    for name in ("iszero", "mux1", "rshift1_correct", "dateencoder", "whitelist", "range_check"):
        c = load(name, 401)
        roles = [c.layout.role(s) for s in range(len(c.layout.names))]
        assert roles == ["input"] * c.n + ["intermediate"] * c.k + ["output"] * c.m
        used = set().union(*(con.poly.slots() for con in c.constraints)) if c.constraints else set()
        assert used <= set(range(c.n + c.k + c.m))
        assert all(con.poly.degree <= 2 for con in c.constraints)


def test_component_slots_are_namespaced():
    c = load("rshift1_correct", 11)
    assert any(n.startswith("main.") and n.count(".") >= 2 for n in c.layout.names)
    assert any("[3]" in n for n in c.layout.names)


def test_lowering_is_deterministic():
    a, b = load("rshift1_correct", 11), load("rshift1_correct", 11)
    assert dumps_json(a) == dumps_json(b)
    assert to_json(a)["schema"] == 1


@pytest.mark.parametrize("name, q", [
    ("iszero", 11), ("iszero", 401), ("mux1", 401), ("rshift1_correct", 11), ("rshift1_correct", 401),
    ("dateencoder", 401), ("transfer", 11), ("whitelist", 401), ("range_check", 401), ("hashcheck", 401),
])
def test_ok_traces_satisfy_constraints(name, q):
    c = load(name, q)
    rng = random.Random(name)
    for _ in range(400):
        x = tuple(rng.choice([0, 1, 2, q - 1, rng.randrange(q)]) for _ in range(c.n))
        t = interpret(c, x)
        if t.ok:
            assert satisfies(c, t), x
