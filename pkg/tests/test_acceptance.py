"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line.

Run just this file with ``pytest tests/test_acceptance.py -v``; the runtime
campaign takes several minutes.
"""

import numpy as np
import pytest

from seqbap.baselines import all_mcms, brute_force_enumerate
from seqbap.bench import generate_instance, loglog_slope, run_benchmark, summarize, tie_heavy_instance
from seqbap.bottleneck import has_positive_price, mcm_size, price_of_absence, solve_bap
from seqbap.distributed import build_comm_graph_radius, complete_comm_graph, run_distributed_seqbap
from seqbap.engine import enumerate_seqbap_solutions, solve_seqbap
from seqbap.errors import DisconnectedTopology
from seqbap.graph import Matching, WeightedBipartiteGraph
from test_bottleneck import TREE, TREE_MATCHING


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def euclidean_family():
    """200 Euclidean instances with 2..7 agents."""
    return [generate_instance(2 + seed % 6, 1000 + seed).graph for seed in range(200)]


def tie_family():
    """200 complete instances with weights in 1..4 and 2..5 agents."""
    return [tie_heavy_instance(2 + seed % 4, seed) for seed in range(200)]


def sparse_tie_instance(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 6
    w = rng.integers(1, 5, size=(n, n)).astype(float)
    w[rng.random((n, n)) < 0.3] = np.inf
    g = WeightedBipartiteGraph.from_matrix(w)
    if mcm_size(g) < n:
        w[np.arange(n), np.arange(n)] = np.where(np.isfinite(w.diagonal()), w.diagonal(), 4.0)
        g = WeightedBipartiteGraph.from_matrix(w)
    return g


def sparse_family():
    """200 instances with up to 6 agents, ties and missing edges."""
    return [sparse_tie_instance(seed) for seed in range(200)]


def distinct_family():
    """50 Euclidean instances with 3..8 agents."""
    return [generate_instance(3 + seed % 6, 5000 + seed).graph for seed in range(50)]


def test_criterion_1_oracle_exactness(report):
    bad = []
    for k, g in enumerate(euclidean_family()):
        result = solve_seqbap(g)
        if not result.exact or result.weight_tuple(g) != brute_force_enumerate(g).lex_min_tuple:
            bad.append(k)
    report(1, not bad, f"200 Euclidean instances (n=2..7), exact flag set and lex-minimal tuple; failures {bad}")


def test_criterion_2_inclusion_chain(report):
    bad = []
    for k, g in enumerate(tie_family()):
        sets = brute_force_enumerate(g)
        seq = enumerate_seqbap_solutions(g)
        if not (sets.lexbap_solutions <= seq <= sets.bap_solutions):
            bad.append(k)
    report(2, not bad, f"200 tie-heavy instances (n=2..5), LexBAP <= SeqBAP <= BAP; failures {bad}")


def test_criterion_3_counterexample(report):
    g = WeightedBipartiteGraph.from_matrix([[2.0, 2.0], [1.0, 2.0]])
    n_lex = len(brute_force_enumerate(g).lexbap_solutions)
    n_seq = len(enumerate_seqbap_solutions(g))
    exact = solve_seqbap(g).exact
    ok = n_lex == 1 and n_seq == 2 and exact is False
    report(3, ok, f"LexBAP solutions {n_lex}, SeqBAP solutions {n_seq}, exact={exact}")


def test_criterion_4_positive_price_test(report):
    checked, bad = 0, []
    for k, g in enumerate(sparse_family()):
        m = solve_bap(g).matching
        for e in m:
            checked += 1
            if has_positive_price(g, m, e) != price_of_absence(g, e).positive:
                bad.append((k, e))
    report(4, not bad, f"{checked} bottleneck edges on 200 instances (n<=6) agree with the definition; failures {bad}")


def test_criterion_5_tree_example(report):
    positive = {e for e in TREE_MATCHING if has_positive_price(TREE, TREE_MATCHING, e)}
    zero = set(TREE_MATCHING) - positive
    ok = zero == {(5, 5), (6, 6)} and len(positive) == 4
    report(5, ok, f"zero-price matched edges {sorted(zero)}, positive {sorted(positive)}")


def test_criterion_6_batch_weights_non_increasing(report):
    instances = euclidean_family() + tie_family() + sparse_family() + distinct_family()
    bad = []
    for k, g in enumerate(instances):
        levels = [b.bottleneck_weight_at_selection for b in solve_seqbap(g).selections]
        if any(b > a for a, b in zip(levels, levels[1:])):
            bad.append(k)
    report(6, not bad, f"{len(instances)} instances, batch bottleneck weights non-increasing; failures {bad}")


def test_criterion_7_runtime_ordering(report):
    records = run_benchmark([50, 100, 200], 20, seed=0)
    summary = summarize(records)
    med = {(r.n, r.algorithm): r.median_seconds for r in summary}
    ordered = all(med[n, "seqbap"] < med[n, "naive"] < med[n, "exact"] for n in (50, 100, 200))
    slope_seq, slope_exact = loglog_slope(summary, "seqbap"), loglog_slope(summary, "exact")
    table = "; ".join(
        f"n={n}: seqbap {med[n, 'seqbap']:.3f}s, naive {med[n, 'naive']:.3f}s, exact {med[n, 'exact']:.3f}s"
        for n in (50, 100, 200)
    )
    ok = ordered and slope_seq < slope_exact
    report(7, ok, f"medians over 20 realizations: {table}; slopes seqbap {slope_seq:.2f}, exact {slope_exact:.2f}")


def test_criterion_8_distributed_equivalence(report):
    used, bad, diameters = [], [], []
    seed = 0
    while len(used) < 20:
        inst = generate_instance(10, seed)
        try:
            comm = build_comm_graph_radius(inst.positions, 30.0)
        except DisconnectedTopology:
            seed += 1
            continue
        g = inst.graph
        central = solve_seqbap(g)
        result_d, trace_d = run_distributed_seqbap(g, comm)
        result_1, trace_1 = run_distributed_seqbap(g, complete_comm_graph(g.agents))
        if (
            result_d.matching != central.matching
            or result_1.matching != central.matching
            or trace_d.clock_steps != comm.diameter * trace_1.clock_steps
        ):
            bad.append(seed)
        used.append(seed)
        diameters.append(comm.diameter)
        seed += 1
    report(
        8,
        not bad,
        f"20 connected radius-30 topologies (seeds {used[0]}..{used[-1]}, diameters {sorted(set(diameters))}), "
        f"same matching and clock(D) = D x clock(1); failures {bad}",
    )


def test_criterion_9_initialization_invariance(report):
    bad = []
    for k, g in enumerate(distinct_family()):
        rng = np.random.default_rng(k)
        mcms = all_mcms(g) if len(g.tasks) <= 4 else None
        starts = []
        while len(starts) < 3:
            if mcms is not None:
                m0 = mcms[int(rng.integers(len(mcms)))]
            else:
                m0 = Matching(zip(g.agents, rng.permutation(g.tasks).tolist()))
            if m0 not in starts:
                starts.append(m0)
        outputs = {solve_seqbap(g, m0).matching for m0 in starts}
        if len(outputs) != 1:
            bad.append(k)
    report(9, not bad, f"50 distinct-weight instances x 3 initial MCMs give one matching each; failures {bad}")
