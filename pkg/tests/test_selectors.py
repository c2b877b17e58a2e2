import random
from collections import Counter

from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from zkforge.executor import AbortReason, ASSERTION, OUT_OF_RANGE, execute
from zkforge.field import BN254_PRIME, PrimeField
from zkforge.ir import Poly
from zkforge.selectors import (
    ArrayGuardState, SkewedSampler, ZeroDivTarget, find_hash_check_targets, find_zero_div_targets,
    observe_abort, patch_hash_check, sample_input, solve_quadratic, solve_zero,
)

from conftest import build, load


def primes_below(n):
    return [p for p in range(2, n) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


def univariate_target(q, a, b, c):
    return ZeroDivTarget(0, Poly({(0, 0): a, (0,): b, (): c}, q), "denominator")


# -- skewed sampler --------------------------------------------------------------------

def test_bn254_band_frequencies():
    s = SkewedSampler(PrimeField(BN254_PRIME))
    rng = random.Random(2024)
    counts = Counter(s.band_of(s.draw(rng)) for _ in range(100_000))
    expected = {"binary": 0.15, "small": 0.34, "near-top": 0.50, "other": 0.01}
    assert s.band_names() == ["binary", "small", "near-top", "other"]
    for band, p in expected.items():
        assert abs(counts[band] / 100_000 - p) <= 0.02
    stat = chisquare([counts[b] for b in expected], [p * 100_000 for p in expected.values()])
    assert stat.pvalue > 0.001


def test_values_are_uniform_inside_a_band():
    s = SkewedSampler(PrimeField(BN254_PRIME))
    rng = random.Random(7)
    small = Counter(v for v in (s.draw(rng) for _ in range(60_000)) if 2 <= v <= 10)
    assert set(small) == set(range(2, 11))
    assert chisquare([small[v] for v in range(2, 11)]).pvalue > 0.001


def test_tiny_field_bands_collapse():
    s = SkewedSampler(PrimeField(3))
    rng = random.Random(0)
    assert {s.draw(rng) for _ in range(500)} == {0, 1, 2}
    assert abs(sum(s.band_probabilities().values()) - 1) < 1e-12


def test_small_field_bands_merge_and_renormalise():
    s = SkewedSampler(PrimeField(11))
    probs = s.band_probabilities()
    # near-top [2, 10] coincides with small, and nothing is left for "other"
    assert set(probs) == {"binary", "small+near-top"}
    assert abs(probs["binary"] - 0.15 / 0.99) < 1e-12


def test_guard_cap_limits_draws():
    s = SkewedSampler(PrimeField(BN254_PRIME))
    guard = ArrayGuardState(cap=4, min_dim=4)
    rng = random.Random(1)
    draws = [v for _ in range(300) for v in sample_input(s, 3, guard, rng)]
    assert set(draws) == set(range(5))


def test_sample_input_accepts_layout():
    c = load("transfer", 11)
    x = sample_input(SkewedSampler(c.field), c.layout, None, random.Random(0))
    assert len(x) == 3 and all(0 <= v < 11 for v in x)


# -- zero-division solving ----------------------------------------------------------------

def test_solve_zero_examples():
    assert solve_zero(univariate_target(11, 0, 1, 3), (0,), PrimeField(11)) == 8
    assert solve_zero(univariate_target(7, 1, 0, -1), (0,), PrimeField(7)) in {1, 6}
    assert solve_zero(univariate_target(5, 1, 0, -3), (0,), PrimeField(5)) is None
    assert solve_zero(univariate_target(5, 0, 0, 3), (0,), PrimeField(5)) is None


def test_solve_zero_uses_other_inputs_as_coefficients():
    # x0 * x1 + 4 with x1 = 3 over q = 11
    target = ZeroDivTarget(0, Poly({(0, 1): 1, (): 4}, 11), "denominator")
    root = solve_zero(target, (0, 3), PrimeField(11), var=0)
    assert (root * 3 + 4) % 11 == 0


def test_zero_div_targets_found():
    c = load("zerodiv", 11)
    targets = find_zero_div_targets(c)
    assert {t.role for t in targets} == {"numerator", "denominator"}
    den = [t for t in targets if t.role == "denominator"][0]
    assert den.variables() == [1]
    assert solve_zero(den, (4, 9), c.field, 1) == 0
    assert find_zero_div_targets(load("transfer", 11)) == []


def test_solver_matches_enumeration_small_primes():
    for q in primes_below(30):
        f = PrimeField(q)
        for a in range(q):
            for b in range(q):
                target = ZeroDivTarget(0, Poly({(0, 0): a, (0,): b, (1,): 1}, q), "denominator")
                for c in range(q):
                    roots = {x for x in range(q) if (a * x * x + b * x + c) % q == 0}
                    got = solve_zero(target, (0, c), f, 0)
                    if a == 0 and b == 0:
                        assert got is None
                    elif roots:
                        assert got in roots
                    else:
                        assert got is None


@settings(max_examples=300)
@given(st.integers(0, BN254_PRIME - 1), st.integers(0, BN254_PRIME - 1), st.integers(0, BN254_PRIME - 1))
def test_quadratic_roots_verify_on_a_large_field(a, b, c):
    f = PrimeField(BN254_PRIME)
    r = solve_quadratic(a, b, c, f)
    if r is not None:
        assert (a * r * r + b * r + c) % BN254_PRIME == 0
    elif a == 0:
        assert b == 0
    else:
        assert not f.is_residue((b * b - 4 * a * c) % BN254_PRIME)


# -- hash-check patching --------------------------------------------------------------

def test_hash_check_patch_matches_digest():
    c = load("hashcheck")
    targets = find_hash_check_targets(c)
    assert [t.input_slot for t in targets] == [1]
    before = (c.instructions, c.constraints)
    patch = patch_hash_check(c, (5, 0), random.Random(0), 1.0)
    assert set(patch) == {1}
    assert execute(c, (5, patch[1])).ok
    assert not execute(c, (5, 0)).ok
    assert (c.instructions, c.constraints) == before


def test_hash_check_patch_absent_cases():
    c = load("hashcheck")
    assert patch_hash_check(c, (5, 0), random.Random(0), 0.0) is None
    assert patch_hash_check(load("iszero"), (5,), random.Random(0), 1.0) is None


def test_hash_check_skips_inputs_already_read():
    c = build("""
template R() {
    signal input a, b;
    signal output o;
    o <== a * b;
    a === o;
}
component main = R();
""", 11)
    assert find_hash_check_targets(c) == []


# -- array guard ------------------------------------------------------------------------

def oor():
    return AbortReason(OUT_OF_RANGE, 0, 9, 5)


def test_guard_activates_after_threshold():
    g = ArrayGuardState(min_dim=5)
    for i in range(8):
        assert g.cap is None
        g = observe_abort(g, oor())
    assert g.cap == 5 and g.count == 8


def test_guard_resets_on_other_abort():
    g = ArrayGuardState(min_dim=5)
    for _ in range(7):
        g = observe_abort(g, oor())
    g = observe_abort(g, AbortReason(ASSERTION, 1))
    assert g.count == 0 and g.cap is None
    g = observe_abort(g, oor())
    assert g.cap is None


def test_guard_inactive_without_arrays():
    g = ArrayGuardState.for_circuit(load("iszero", 11))
    for _ in range(50):
        g = observe_abort(g, oor())
    assert g.cap is None
    c = load("rshift1_correct", 11)
    assert ArrayGuardState.for_circuit(c).min_dim == min(c.array_dims) == 3
