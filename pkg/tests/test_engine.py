import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graphs
from seqbap.baselines import all_mcms, brute_force_enumerate
from seqbap.bottleneck import bottleneck_weight
from seqbap.engine import enumerate_seqbap_solutions, solve_seqbap
from seqbap.errors import EnumerationLimitError, InfeasibleError, NotAnMCMError
from seqbap.graph import Matching, WeightedBipartiteGraph, WeightTuple

DISTINCT_2X2 = WeightedBipartiteGraph.from_matrix([[1.0, 3.0], [2.0, 4.0]])
COUNTEREXAMPLE = WeightedBipartiteGraph.from_matrix([[2.0, 2.0], [1.0, 2.0]])


def test_distinct_two_by_two():
    result = solve_seqbap(DISTINCT_2X2)
    assert result.matching == {(0, 1), (1, 0)}
    assert result.weight_tuple(DISTINCT_2X2) == (3.0, 2.0)
    assert result.exact


def test_counterexample_is_not_certified():
    result = solve_seqbap(COUNTEREXAMPLE)
    assert not result.exact
    assert result.matching in all_mcms(COUNTEREXAMPLE)
    assert any(b.zero_price for b in result.selections)


def test_single_edge():
    g = WeightedBipartiteGraph({(3, 7): 1.5})
    result = solve_seqbap(g)
    assert result.matching == {(3, 7)}
    assert result.exact
    assert len(result.selections) == 1


def test_enumerated_solutions_of_small_examples():
    assert enumerate_seqbap_solutions(DISTINCT_2X2) == {Matching([(0, 1), (1, 0)])}
    assert enumerate_seqbap_solutions(COUNTEREXAMPLE) == set(all_mcms(COUNTEREXAMPLE))


def test_enumeration_cap():
    with pytest.raises(EnumerationLimitError):
        enumerate_seqbap_solutions(WeightedBipartiteGraph.from_matrix(np.ones((7, 7))))


@given(graphs(max_agents=4, levels=3))
def test_solution_sets_are_nested(g):
    report = brute_force_enumerate(g)
    seq = enumerate_seqbap_solutions(g)
    assert report.lexbap_solutions <= seq <= report.bap_solutions


@given(graphs(max_agents=4, levels=3))
def test_exact_flag_iff_unique_seqbap_solution(g):
    result = solve_seqbap(g)
    seq = enumerate_seqbap_solutions(g)
    assert result.matching in seq
    assert result.exact == (len(seq) == 1)


@given(graphs(max_agents=5, levels=4))
def test_batch_weights_never_increase(g):
    levels = [b.bottleneck_weight_at_selection for b in solve_seqbap(g).selections]
    assert levels == sorted(levels, reverse=True)


@given(graphs(max_agents=5, levels=4))
def test_batches_partition_the_matching(g):
    result = solve_seqbap(g)
    locked = [e for b in result.selections for e in b.locked_edges]
    assert len(locked) == len(set(locked)) == len(result.matching)
    assert set(locked) == result.matching
    assert result.exact == (not any(b.zero_price for b in result.selections))
    for b in result.selections:
        assert g.weight(b.critical_edge) == b.bottleneck_weight_at_selection


@given(graphs(max_agents=5, levels=4))
def test_tuple_never_beats_lexbap(g):
    result = solve_seqbap(g)
    best = brute_force_enumerate(g).lex_min_tuple
    assert result.weight_tuple(g) >= best
    if result.exact:
        assert result.weight_tuple(g) == best


@given(graphs(max_agents=6, levels=4))
def test_result_is_a_bottleneck_assignment(g):
    result = solve_seqbap(g)
    assert len(result.matching) == len(g.tasks)
    assert result.weight_tuple(g)[0] == bottleneck_weight(g)


@given(graphs(max_agents=6))
def test_distinct_weights_are_always_exact(g):
    result = solve_seqbap(g)
    assert result.exact
    assert result.weight_tuple(g) == brute_force_enumerate(g).lex_min_tuple


@given(graphs(max_agents=5), st.data())
def test_start_matching_does_not_matter_when_exact(g, data):
    mcms = all_mcms(g)
    m0 = data.draw(st.sampled_from(mcms))
    assert solve_seqbap(g, m0).matching == solve_seqbap(g).matching


@given(graphs(max_agents=5, levels=3), st.data())
def test_any_start_gives_a_seqbap_solution(g, data):
    m0 = data.draw(st.sampled_from(all_mcms(g)))
    assert solve_seqbap(g, m0).matching in enumerate_seqbap_solutions(g)


@given(graphs(max_agents=6, square=True), st.permutations(range(6)), st.permutations(range(6)))
def test_relabelling_vertices_relabels_the_solution(g, pa, pt):
    # distinct weights: the answer must not depend on scan order
    n = len(g.agents)
    agents = [p for p in pa if p < n]
    tasks = [p for p in pt if p < n]
    relabelled = WeightedBipartiteGraph({(agents[a], tasks[t]): w for (a, t), w in g.weights.items()})
    expected = {(agents[a], tasks[t]) for a, t in solve_seqbap(g).matching}
    assert solve_seqbap(relabelled).matching == expected


def test_deterministic_and_serialisable():
    rng = np.random.default_rng(5)
    g = WeightedBipartiteGraph.from_matrix(rng.integers(1, 4, size=(6, 6)).astype(float))
    first, second = solve_seqbap(g), solve_seqbap(g)
    assert first == second
    doc = json.loads(json.dumps(first.to_dict(g)))
    assert [tuple(e) for e in doc["matching"]] == sorted(first.matching)
    assert doc["weight_tuple"] == list(first.weight_tuple(g))
    assert doc["exact"] is first.exact
    assert len(doc["batches"]) == len(first.selections)


def test_start_must_be_maximum():
    with pytest.raises(NotAnMCMError):
        solve_seqbap(DISTINCT_2X2, [(0, 1)])
    with pytest.raises(NotAnMCMError):
        solve_seqbap(DISTINCT_2X2, [(0, 1), (1, 5)])


def test_infeasible():
    with pytest.raises(InfeasibleError):
        solve_seqbap(WeightedBipartiteGraph({(0, 0): 1.0, (0, 1): 1.0}))


def test_weight_tuple_helper():
    result = solve_seqbap(DISTINCT_2X2)
    assert isinstance(result.weight_tuple(DISTINCT_2X2), WeightTuple)
