import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from zkforge.ir import op_category
from zkforge.mutation import (
    IDENTITY, SCORE_CAP, MutantGenome, MutationParams, MutationSite, ReplaceConstant, Roulette,
    SubstituteOperator, crossover, enumerate_sites, random_mutant, roulette_select, selection_weight,
)
from zkforge.selectors import SkewedSampler

from conftest import load


def test_uc_iszero_sites():
    sites = enumerate_sites(load("uc_iszero", 11))
    rhs = [s for s in sites if s.kind == "rhs"]
    ops = [s for s in sites if s.kind == "op"]
    assert len(rhs) == 1
    assert {s.instruction for s in ops} == {rhs[0].instruction}
    assert sorted(s.operator for s in ops) == ["!=", "/"]


def test_no_weak_assignments_means_no_sites():
    assert enumerate_sites(load("transfer", 11), mode="pp") == []


def test_core_mode_adds_strong_assignments():
    c = load("transfer", 11)
    core = enumerate_sites(c, mode="core")
    assert {c.instructions[s.instruction].kind for s in core} == {"strong"}


def test_whitelisted_templates_contribute_no_sites():
    c = load("rshift1_correct", 11)
    assert enumerate_sites(c) == []
    unlisted = enumerate_sites(c, whitelist=())
    assert any("Num2Bits" in c.instructions[s.instruction].templates for s in unlisted)
    for s in enumerate_sites(c, mode="core"):
        assert "Num2Bits" not in c.instructions[s.instruction].templates


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        enumerate_sites(load("iszero", 11), mode="fast")


def sampler_draw(q):
    return SkewedSampler(load("iszero", q).field).draw


def test_random_mutant_is_reproducible():
    c = load("uc_iszero", 11)
    sites = enumerate_sites(c)
    draw = sampler_draw(11)
    params = MutationParams(mutation_prob=1.0, op_sub_prob=0.0)
    a = random_mutant(sites, random.Random(3), params, draw)
    b = random_mutant(sites, random.Random(3), params, draw)
    assert a == b and len(a) == 1
    (action,) = a.values()
    assert isinstance(action, ReplaceConstant) and 0 <= action.value < 11


def test_zero_probability_gives_identity():
    sites = enumerate_sites(load("uc_iszero", 11))
    g = random_mutant(sites, random.Random(0), MutationParams(mutation_prob=0.0), sampler_draw(11))
    assert g == IDENTITY and len(g) == 0
    assert random_mutant([], random.Random(0), MutationParams(), sampler_draw(11)) == IDENTITY


def test_operator_substitution_stays_in_category():
    sites = enumerate_sites(load("rshift1_uc", 11))
    seen = set()
    for seed in range(200):
        g = random_mutant(sites, random.Random(seed), MutationParams(1.0, 1.0), sampler_draw(11))
        for site, action in g.items():
            assert isinstance(action, SubstituteOperator) and site.operator == ">>"
            seen.add(action.replacement)
    assert seen == set(op_category(">>")) - {">>"}


def test_crossover_examples():
    s1, s2 = MutationSite(0, "rhs"), MutationSite(1, "rhs")
    a, b = MutantGenome({s1: ReplaceConstant(1)}), MutantGenome({s2: ReplaceConstant(2)})
    assert crossover(a, b, random.Random(0)) == MutantGenome({s1: ReplaceConstant(1), s2: ReplaceConstant(2)})
    c = MutantGenome({s1: ReplaceConstant(5)})
    outcomes = {crossover(a, c, random.Random(seed)) for seed in range(50)}
    assert outcomes == {a, c}
    assert crossover(IDENTITY, IDENTITY, random.Random(0)) == IDENTITY


genomes = st.dictionaries(
    st.builds(MutationSite, st.integers(0, 6), st.just("rhs")),
    st.builds(ReplaceConstant, st.integers(0, 100)),
    max_size=5,
).map(MutantGenome)


@given(genomes, genomes, st.integers(0, 2 ** 32))
def test_crossover_union_property(a, b, seed):
    child = crossover(a, b, random.Random(seed))
    assert child.sites() == a.sites() | b.sites()
    for site, action in child.items():
        assert action in (a.get(site), b.get(site))


@given(genomes)
def test_genome_json_round_trip(g):
    assert MutantGenome.from_json(g.to_json()) == g


def test_selection_weights_are_strictly_monotone():
    scores = [0, 1, 2, 10, 10 ** 6, SCORE_CAP - 1, SCORE_CAP]
    weights = [selection_weight(s) for s in scores]
    assert all(a > b for a, b in zip(weights, weights[1:]))
    assert selection_weight(math.inf) < selection_weight(SCORE_CAP)
    assert selection_weight(math.inf) > 0


def test_zero_score_dominates_infinite():
    w0, winf = selection_weight(0), selection_weight(math.inf)
    assert w0 / (w0 + winf) >= 0.9
    g1, g2 = MutantGenome({MutationSite(0, "rhs"): ReplaceConstant(1)}), IDENTITY
    rng = random.Random(1)
    picks = Counter(roulette_select([(g1, 0), (g2, math.inf)], rng) for _ in range(2000))
    assert picks[g1] >= 1800


def test_equal_scores_select_uniformly():
    population = [(MutantGenome({MutationSite(i, "rhs"): ReplaceConstant(i)}), 7) for i in range(6)]
    wheel = Roulette(population)
    rng = random.Random(5)
    counts = Counter(wheel.select(rng) for _ in range(12000))
    stat = chisquare([counts[g] for g, _ in population])
    assert stat.pvalue > 0.001


def test_roulette_edge_cases():
    g = MutantGenome({MutationSite(0, "rhs"): ReplaceConstant(1)})
    assert roulette_select([(g, math.inf)], random.Random(0)) == g
    with pytest.raises(ValueError):
        roulette_select([], random.Random(0))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_generated_genomes_avoid_whitelist(seed):
    c = load("rshift1_correct", 11)
    sites = enumerate_sites(c, mode="core")
    rng = random.Random(seed)
    draw = sampler_draw(11)
    a = random_mutant(sites, rng, MutationParams(0.5, 0.5), draw)
    b = random_mutant(sites, rng, MutationParams(0.5, 0.5, extra_operators=True), draw)
    for site in crossover(a, b, rng):
        assert "Num2Bits" not in c.instructions[site.instruction].templates
