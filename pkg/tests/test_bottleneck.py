import math

import numpy as np
import pytest
from hypothesis import given

from conftest import graphs
from seqbap.baselines import brute_force_bottleneck_weight, brute_force_enumerate
from seqbap.bottleneck import (
    PriceOfAbsence,
    bottleneck_weight,
    has_positive_price,
    is_critical_bottleneck_edge,
    price_of_absence,
    solve_bap,
)
from seqbap.errors import InfeasibleError, InvalidInstance, NotAnMCMError
from seqbap.graph import Matching, WeightedBipartiteGraph, sublevel_set

# Sublevel set and matching of the tree-shaped example: matched edges (k, k),
# plus the dashed non-matching edges. Two heavier edges sit outside the
# sublevel set and must not change anything.
TREE_MATCHING = Matching((k, k) for k in range(1, 7))
TREE_DASHED = [(2, 1), (3, 2), (4, 2), (1, 5), (5, 6), (6, 5)]
TREE_WEIGHTS = {
    **{(1, 1): 5.0, (2, 2): 4.0, (3, 3): 5.0, (4, 4): 2.0, (5, 5): 3.0, (6, 6): 5.0},
    **{(2, 1): 1.0, (3, 2): 5.0, (4, 2): 2.0, (1, 5): 4.0, (5, 6): 5.0, (6, 5): 3.0},
    (1, 2): 9.0,
    (6, 1): 7.0,
}
TREE = WeightedBipartiteGraph(TREE_WEIGHTS)


def alternating_paths(psi, m, edge):
    """All alternating paths in ``psi`` relative to ``m`` from the edge's agent to its task."""
    a_p, b_p = edge
    owner = {t: a for a, t in m}
    found = [[edge]]

    def walk(agent, used_tasks, path):
        for a, t in sorted(psi):
            if a != agent or (a, t) in m or t in used_tasks:
                continue
            step = path + [(a, t)]
            if t == b_p:
                found.append(step)
            elif t in owner:
                nxt = owner[t]
                walk(nxt, used_tasks | {t}, step + [(nxt, t)])

    walk(a_p, frozenset(), [])
    return found


def test_tree_example_is_a_bottleneck_assignment():
    assert sublevel_set(TREE, TREE_MATCHING) == TREE_MATCHING | set(TREE_DASHED)
    assert brute_force_bottleneck_weight(TREE) == 5.0
    assert TREE_MATCHING in brute_force_enumerate(TREE).bap_solutions


@pytest.mark.parametrize("edge", sorted(TREE_MATCHING))
def test_tree_example_positive_prices(edge):
    expected = edge not in {(5, 5), (6, 6)}
    assert has_positive_price(TREE, TREE_MATCHING, edge) is expected
    assert price_of_absence(TREE, edge).positive is expected


def test_tree_example_augmenting_path_after_removal():
    paths = alternating_paths(sublevel_set(TREE, TREE_MATCHING), TREE_MATCHING, (5, 5))
    assert [(5, 6), (6, 6), (6, 5)] in paths


@given(graphs(max_agents=5, levels=4))
def test_positive_price_matches_definition(g):
    m = solve_bap(g).matching
    for e in m:
        assert has_positive_price(g, m, e) == price_of_absence(g, e).positive


@given(graphs(max_agents=5, levels=4))
def test_unmatched_edges_have_zero_price(g):
    m = solve_bap(g).matching
    for e in g.edges - m:
        assert not has_positive_price(g, m, e)
        assert price_of_absence(g, e).value == 0


@given(graphs(max_agents=5, levels=3, square=True))
def test_positive_price_iff_edge_is_the_only_alternating_path(g):
    # needs a perfect matching: with spare agents a path can start elsewhere
    m = solve_bap(g).matching
    psi = sublevel_set(g, m)
    for e in m:
        unique = len(alternating_paths(psi, m, e)) == 1
        assert has_positive_price(g, m, e) == unique


@given(graphs(max_agents=6))
def test_bap_weight_matches_brute_force(g):
    cert = solve_bap(g)
    assert cert.bottleneck_weight == brute_force_bottleneck_weight(g)
    assert len(cert.matching) == len(g.tasks)
    assert max(g.weight(e) for e in cert.matching) == cert.bottleneck_weight
    assert g.weight(cert.bottleneck_edge) == cert.bottleneck_weight


@given(graphs(max_agents=6, levels=4))
def test_certificate_edge_is_critical(g):
    cert = solve_bap(g)
    assert is_critical_bottleneck_edge(g, cert.matching, cert.bottleneck_edge)


def test_spare_agent_breaks_path_uniqueness():
    g = WeightedBipartiteGraph.from_matrix([[1.0], [1.0]])
    m = Matching([(0, 0)])
    assert alternating_paths(sublevel_set(g, m), m, (0, 0)) == [[(0, 0)]]
    assert not has_positive_price(g, m, (0, 0))
    assert not price_of_absence(g, (0, 0)).positive


def test_non_optimal_heaviest_edge_is_not_critical():
    g = WeightedBipartiteGraph.from_matrix([[1.0, 3.0], [2.0, 4.0]])
    assert not is_critical_bottleneck_edge(g, [(0, 0), (1, 1)], (1, 1))
    assert is_critical_bottleneck_edge(g, [(0, 1), (1, 0)], (0, 1))
    with pytest.raises(InvalidInstance):
        is_critical_bottleneck_edge(g, [(0, 1), (1, 0)], (1, 0))


def test_two_by_two_bottleneck():
    g = WeightedBipartiteGraph.from_matrix([[1.0, 3.0], [2.0, 4.0]])
    cert = solve_bap(g)
    assert cert.bottleneck_weight == 3.0
    assert cert.matching == {(0, 1), (1, 0)}


@pytest.mark.parametrize(
    "m0",
    [[(0, 0), (1, 1), (2, 2)], [(0, 2), (1, 1), (2, 0)], [(0, 1), (1, 2), (2, 0)]],
)
def test_bap_weight_does_not_depend_on_start(m0):
    g = WeightedBipartiteGraph.from_matrix([[4.0, 2.0, 9.0], [3.0, 8.0, 1.0], [7.0, 5.0, 6.0]])
    assert solve_bap(g, m0).bottleneck_weight == 5.0


def test_single_edge_has_infinite_price():
    g = WeightedBipartiteGraph({(0, 0): 2.5})
    assert price_of_absence(g, (0, 0)).is_infinite
    assert has_positive_price(g, [(0, 0)], (0, 0))


def test_bridge_edge_has_infinite_price():
    g = WeightedBipartiteGraph({(0, 0): 1.0, (1, 0): 1.0, (1, 1): 1.0})
    assert math.isinf(price_of_absence(g, (0, 0)).value)
    assert price_of_absence(g, (1, 0)).value == 0


def test_price_value_is_bottleneck_increase():
    g = WeightedBipartiteGraph.from_matrix([[1.0, 3.0], [2.0, 4.0]])
    assert price_of_absence(g, (0, 1)).value == 1.0  # forced onto (0,0),(1,1) with max 4


def test_price_must_be_non_negative():
    with pytest.raises(ValueError):
        PriceOfAbsence(-1.0)


def test_infeasible_graph_is_rejected():
    g = WeightedBipartiteGraph({(0, 0): 1.0, (0, 1): 1.0})
    with pytest.raises(InfeasibleError):
        solve_bap(g)


def test_non_maximum_start_is_rejected():
    g = WeightedBipartiteGraph.from_matrix(np.ones((2, 2)))
    with pytest.raises(NotAnMCMError):
        solve_bap(g, [(0, 0)])
    with pytest.raises(NotAnMCMError):
        has_positive_price(g, [(0, 0)], (0, 0))


def test_rectangular_graph_leaves_agents_free():
    g = WeightedBipartiteGraph.from_matrix([[5.0], [1.0], [3.0]])
    assert bottleneck_weight(g) == 1.0
    assert solve_bap(g).matching == {(1, 0)}
