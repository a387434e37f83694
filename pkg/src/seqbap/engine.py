"""Greedy sequential bottleneck assignment with an exactness certificate.

:func:`solve_seqbap` repeatedly descends to a bottleneck assignment of the
remaining graph, locks every matched edge whose price of absence is positive,
and removes the locked agents and tasks. Positivity is decided by one
augmenting-path search per edge, never by solving a second BAP. When all
edge weights are pairwise distinct the result is the unique LexBAP solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .baselines import all_mcms
from .bottleneck import (
    _require_mcm,
    _require_saturating,
    descent_step,
    has_augmenting_path_without,
)
from .errors import EnumerationLimitError
from .graph import Edge, Matching, WeightedBipartiteGraph, WeightTuple, max_weight_edges, maximum_cardinality_matching

SEQBAP_ENUMERATION_CAP = 6


@dataclass(frozen=True)
class Batch:
    """Edges locked into the solution after one critical bottleneck edge was found.

    Attributes:
        critical_edge: the critical bottleneck edge of the current matching.
        locked_edges: matched edges with positive price of absence, plus the
            critical edge when none of the heaviest edges had one.
        bottleneck_weight_at_selection: weight of ``critical_edge``.
        zero_price: True when no heaviest edge had a positive price and the
            critical edge was locked as an arbitrary choice.
    """

    critical_edge: Edge
    locked_edges: frozenset
    bottleneck_weight_at_selection: float
    zero_price: bool = False


@dataclass(frozen=True)
class SeqBapResult:
    matching: Matching
    exact: bool
    selections: tuple
    iterations: int

    def weight_tuple(self, g: WeightedBipartiteGraph) -> WeightTuple:
        return WeightTuple.of(g, self.matching)

    def to_dict(self, g: WeightedBipartiteGraph) -> dict:
        return {
            "matching": [list(e) for e in sorted(self.matching)],
            "weight_tuple": list(self.weight_tuple(g)),
            "exact": self.exact,
            "iterations": self.iterations,
            "batches": [
                {
                    "critical_edge": list(b.critical_edge),
                    "locked_edges": [list(e) for e in sorted(b.locked_edges)],
                    "bottleneck_weight": b.bottleneck_weight_at_selection,
                    "zero_price": b.zero_price,
                }
                for b in self.selections
            ],
        }


def solve_seqbap(g: WeightedBipartiteGraph, m0: Optional[Iterable[Edge]] = None) -> SeqBapResult:
    """Solve the SeqBAP starting from the MCM ``m0``.

    Args:
        g: graph in which every task can be matched.
        m0: initial maximum cardinality matching; defaults to
            :func:`maximum_cardinality_matching`.

    Returns:
        The selected matching, the exactness flag (True certifies that it is
        the unique LexBAP solution) and the log of locked batches.
    """
    _require_saturating(g)
    m0 = maximum_cardinality_matching(g) if m0 is None else _require_mcm(g, m0)
    weights = g.matrix
    agent_match, task_match = g.match_arrays(m0)
    alive = g.mask.copy()  # edges of the remaining graph
    ebar = g.mask.copy()  # candidate pool, shrinks with every critical-edge test
    exact = True
    locked: list[Edge] = []
    batches: list[Batch] = []
    iterations = 0

    while (agent_match >= 0).any():
        iterations += 1
        critical, replaced = descent_step(weights, ebar, agent_match, task_match)
        if replaced:
            continue

        level = weights[critical]
        psi = alive & (weights <= level)
        matched = [(int(i), int(agent_match[i])) for i in np.flatnonzero(agent_match >= 0)]
        batch = {e for e in matched if not has_augmenting_path_without(psi, agent_match, task_match, e)}
        heaviest = {e for e in matched if weights[e] == level}
        zero_price = not (batch & heaviest)
        if zero_price:
            exact = False
            batch.add(critical)

        for i, j in batch:
            agent_match[i] = task_match[j] = -1
            alive[i, :] = alive[:, j] = False
            ebar[i, :] = ebar[:, j] = False
        as_ids = frozenset((g.agents[i], g.tasks[j]) for i, j in batch)
        locked.extend(as_ids)
        batches.append(
            Batch(
                critical_edge=(g.agents[critical[0]], g.tasks[critical[1]]),
                locked_edges=as_ids,
                bottleneck_weight_at_selection=float(level),
                zero_price=zero_price,
            )
        )

    return SeqBapResult(Matching(locked), exact, tuple(batches), iterations)


# exhaustive oracle


def enumerate_seqbap_solutions(g: WeightedBipartiteGraph, cap: int = SEQBAP_ENUMERATION_CAP) -> frozenset:
    """All SeqBAP solutions, following every tie in the greedy selection rule.

    At each depth every bottleneck assignment of the remaining graph is
    considered, and within it every heaviest edge whose price of absence is
    maximal; each choice removes the edge's agent and task and recurses.
    Everything is computed by enumeration, independently of the solvers.
    """
    if len(g.tasks) > cap:
        raise EnumerationLimitError(f"{len(g.tasks)} tasks exceed the SeqBAP enumeration cap of {cap}")
    weights = g.weights

    def bottleneck(mcms: list[Matching]) -> float:
        return min(max(weights[e] for e in m) for m in mcms)

    @lru_cache(maxsize=None)
    def solve(agents: frozenset, tasks: frozenset) -> frozenset:
        sub = g.subgraph(agents, tasks)
        mcms = all_mcms(sub, cap)
        if not mcms or not mcms[0]:
            return frozenset({frozenset()})
        level = bottleneck(mcms)

        @lru_cache(maxsize=None)
        def price(e: Edge) -> float:
            reduced = all_mcms(sub.without_edge(e), cap)
            if len(reduced[0]) < len(mcms[0]):
                return math.inf
            return bottleneck(reduced) - level

        out = set()
        for m in mcms:
            if max(weights[e] for e in m) != level:
                continue
            heaviest = max_weight_edges({e: weights[e] for e in m})
            best = max(price(e) for e in heaviest)
            for e in heaviest:
                if price(e) == best:
                    for rest in solve(agents - {e[0]}, tasks - {e[1]}):
                        out.add(rest | {e})
        return frozenset(out)

    return frozenset(Matching(m) for m in solve(frozenset(g.agents), frozenset(g.tasks)))
