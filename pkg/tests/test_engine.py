import itertools
import json

import pytest

from zkforge.engine import (
    OVER, UNDER, FuzzConfig, _Fuzzer, fuzz, score_generation, verify_report, verify_report_json,
)
from zkforge.executor import execute
from zkforge.fitness import INF, mutant_fitness, satisfies
from zkforge.mutation import IDENTITY, MutantGenome, MutationSite, ReplaceConstant

from conftest import build, load


def check_report(circuit, report):
    assert verify_report(circuit, report)
    assert verify_report_json(circuit, json.loads(json.dumps(report.to_json(circuit))))
    if report.verdict == UNDER:
        m = report.mutated
        assert m.ok and satisfies(circuit, m)
        assert not report.original.ok or report.original.y != m.y
    else:
        assert report.original.ok and not satisfies(circuit, report.original)


def test_rshift1_under_constraint_found():
    c = load("rshift1_uc", 11)
    result = fuzz(c, FuzzConfig(seed=3, max_generations=200))
    (report,) = result.reports
    assert report.verdict == UNDER and result.stats.stop_reason == "bug-found"
    x, = report.input
    assert report.original.y == (x >> 1,)
    check_report(c, report)


def test_transfer_abort_is_reported():
    c = load("transfer", 11)
    (report,) = fuzz(c, FuzzConfig(seed=0, max_generations=100)).reports
    assert report.verdict == UNDER
    assert not report.original.ok and report.original.reason.kind == "assertion"
    check_report(c, report)


def test_splitreward_over_constraint_rows():
    c = load("splitreward", 5, assert_disabled=True)
    result = fuzz(c, FuzzConfig(seed=0, max_generations=30, exhaustive=True, detect="over"))
    rows = {(r.input, r.original.z, r.original.y) for r in result.reports}
    assert rows == {((1,), (0,), (1,)), ((3,), (1,), (2,))}
    for r in result.reports:
        assert r.verdict == OVER
        check_report(c, r)


def test_detect_mode_filters_verdicts():
    c = load("splitreward", 5, assert_disabled=True)
    under = fuzz(c, FuzzConfig(seed=0, max_generations=50, detect="under"))
    assert under.reports and all(r.verdict == UNDER for r in under.reports)


def test_first_bug_stop_emits_at_most_one_report_per_verdict():
    c = load("splitreward", 5, assert_disabled=True)
    result = fuzz(c, FuzzConfig(seed=1, max_generations=50))
    verdicts = [r.verdict for r in result.reports]
    assert len(verdicts) == len(set(verdicts)) >= 1


def test_exhaustive_deduplicates_by_site_set():
    c = load("rshift1_uc", 11)
    result = fuzz(c, FuzzConfig(seed=0, max_generations=40, exhaustive=True))
    keys = [(r.verdict, r.genome.sites()) for r in result.reports]
    assert len(keys) == len(set(keys)) and len(keys) >= 1
    assert result.stats.generations == 40


def test_well_constrained_iszero_is_silent():
    c = load("iszero", 401)
    result = fuzz(c, FuzzConfig(seed=0, max_generations=1000))
    assert result.reports == [] and result.stats.stop_reason == "max-generations"


def test_zero_division_bug_found():
    c = load("zerodiv")
    (report,) = fuzz(c, FuzzConfig(seed=0, max_generations=300)).reports
    assert report.input == (0, 0)
    check_report(c, report)


def test_hash_check_patching_is_what_finds_the_bug():
    c = load("hashcheck")
    found = fuzz(c, FuzzConfig(seed=0, max_generations=300)).reports
    assert found and found[0].verdict == UNDER
    check_report(c, found[0])
    blind = fuzz(c, FuzzConfig(seed=0, max_generations=300, hash_check_prob=0.0))
    assert blind.reports == []


def test_same_seed_same_stream():
    c = load("rshift1_uc")
    runs = [[json.dumps(r.to_json(c), sort_keys=True) for r in
             fuzz(c, FuzzConfig(seed=11, max_generations=500, exhaustive=True)).reports] for _ in range(2)]
    assert runs[0] == runs[1] and runs[0]


def test_timeout_uses_injected_clock():
    ticks = itertools.count(0.0, 1.0)
    c = load("iszero", 401)
    result = fuzz(c, FuzzConfig(timeout_secs=5.0, max_generations=10 ** 6), clock=lambda: next(ticks))
    assert result.stats.stop_reason == "timeout"
    assert result.stats.generations < 10


def test_array_guard_engages_on_repeated_out_of_range():
    c = build("""
template Pick(n) {
    signal input i;
    signal input v[n];
    signal output o;
    o <-- v[i];
}
component main = Pick(3);
""")
    f = _Fuzzer(c, FuzzConfig(seed=0, max_generations=20), None, lambda: 0.0)
    f.run()
    assert f.guard.cap == 3


def test_score_generation_matches_fitness():
    c = load("rshift1_uc", 11)
    inputs = [(7,), (4,), (10,)]
    originals = [execute(c, x) for x in inputs]
    g = MutantGenome({MutationSite(0, "rhs"): ReplaceConstant(9)})
    scored = score_generation(c, [g, IDENTITY], inputs, originals)
    assert scored[0] == (g, mutant_fitness(c, g, inputs, originals)) and scored[0][1] == 0
    assert scored[1][1] == INF


def test_forged_reports_fail_the_recheck():
    c = load("rshift1_uc", 11)
    (report,) = fuzz(c, FuzzConfig(seed=3, max_generations=200)).reports
    obj = report.to_json(c)
    obj["mutated"]["y"] = ["0"]
    assert not verify_report_json(c, obj)


@pytest.mark.parametrize("kwargs", [
    {"mutation_prob": 1.5}, {"population_size": 0}, {"mode": "fast"}, {"detect": "sideways"},
    {"max_generations": -1},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        FuzzConfig(**kwargs)


def test_stats_json_shape():
    c = load("transfer", 11)
    stats = fuzz(c, FuzzConfig(seed=0, max_generations=5)).stats
    d = stats.to_json()["stats"]
    assert {"generations", "executions", "wall_time", "under_reports", "over_reports"} <= set(d)
