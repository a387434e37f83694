"""Bottleneck assignment: solver, critical bottleneck edges and price of absence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import InfeasibleError, InvalidInstance, NotAnMCMError
from .graph import (
    Edge,
    Matching,
    WeightedBipartiteGraph,
    apply_path,
    find_augmenting_path,
    maximum_cardinality_matching,
)


@dataclass(frozen=True)
class BottleneckCertificate:
    """A bottleneck assignment together with the critical edge that proves it.

    Attributes:
        matching: an MCM minimising the largest edge weight.
        bottleneck_weight: that smallest possible largest weight.
        bottleneck_edge: a critical bottleneck edge of ``matching``.
        iterations: number of descent steps taken from the initial MCM.
    """

    matching: Matching
    bottleneck_weight: float
    bottleneck_edge: Edge
    iterations: int = 0


@dataclass(frozen=True)
class PriceOfAbsence:
    """Increase of the bottleneck weight when an edge is deleted (``inf`` if the MCM shrinks)."""

    value: float

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"price of absence must be non-negative, got {self.value}")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def positive(self) -> bool:
        return self.value > 0


# index-space kernels shared with the SeqBAP engine


def heaviest_matched_edge(weights: np.ndarray, agent_match: np.ndarray) -> tuple[int, int]:
    """Heaviest edge of the matching; ties go to the lowest agent index."""
    rows = np.flatnonzero(agent_match >= 0)
    w = weights[rows, agent_match[rows]]
    k = int(np.flatnonzero(w == w.max())[0])
    return int(rows[k]), int(agent_match[rows[k]])


def matching_mask(shape: tuple[int, int], agent_match: np.ndarray) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    rows = np.flatnonzero(agent_match >= 0)
    mask[rows, agent_match[rows]] = True
    return mask


def augment_without(
    allowed: np.ndarray, agent_match: np.ndarray, task_match: np.ndarray, edge: tuple[int, int]
) -> Optional[list[tuple[int, int]]]:
    """Search ``allowed \\ {edge}`` for an augmenting path relative to ``M \\ {edge}``.

    ``agent_match``/``task_match`` are left untouched.
    """
    i, j = edge
    allowed = allowed.copy()
    allowed[i, j] = False
    agent_match, task_match = agent_match.copy(), task_match.copy()
    agent_match[i], task_match[j] = -1, -1
    return find_augmenting_path(allowed, agent_match, task_match)


def descent_step(
    weights: np.ndarray, ebar: np.ndarray, agent_match: np.ndarray, task_match: np.ndarray
) -> tuple[tuple[int, int], bool]:
    """One critical-edge test on the current matching, updating state in place.

    Picks the heaviest matched edge, shrinks ``ebar`` to the matching plus the
    strictly lighter edges, and tries to restore cardinality without that
    edge. Returns ``(edge, replaced)``; ``replaced`` is False when the edge is
    critical, in which case the matching is unchanged.
    """
    rows = np.flatnonzero(agent_match >= 0)
    cols = agent_match[rows]
    w = weights[rows, cols]
    k = int(np.argmax(w))  # first maximum, i.e. lowest agent index
    i, j = int(rows[k]), int(cols[k])
    ebar &= weights < w[k]
    ebar[rows, cols] = True
    ebar[i, j] = False
    agent_match[i], task_match[j] = -1, -1
    path = find_augmenting_path(ebar, agent_match, task_match)
    ebar[i, j] = True
    if path is None:
        agent_match[i], task_match[j] = j, i
        return (i, j), False
    apply_path(path, agent_match, task_match)
    return (i, j), True


def bap_descent(
    weights: np.ndarray, mask: np.ndarray, agent_match: np.ndarray, task_match: np.ndarray
) -> tuple[tuple[int, int], int]:
    """Run :func:`descent_step` until a critical bottleneck edge is found.

    The matching arrays must hold an MCM of ``mask`` and are updated in place
    to a bottleneck assignment. Returns the critical edge and the number of
    steps taken.
    """
    ebar = mask.copy()
    steps = 0
    while True:
        steps += 1
        edge, replaced = descent_step(weights, ebar, agent_match, task_match)
        if not replaced:
            return edge, steps


def has_augmenting_path_without(
    allowed: np.ndarray, agent_match: np.ndarray, task_match: np.ndarray, edge: tuple[int, int]
) -> bool:
    return augment_without(allowed, agent_match, task_match, edge) is not None


# public API


def mcm_size(g: WeightedBipartiteGraph) -> int:
    return len(maximum_cardinality_matching(g))


def _require_saturating(g: WeightedBipartiteGraph) -> None:
    if not g.tasks:
        raise InvalidInstance("graph has no tasks")
    if mcm_size(g) != len(g.tasks):
        raise InfeasibleError("not every task can be matched to an agent")


def _require_mcm(g: WeightedBipartiteGraph, m: Iterable[Edge]) -> Matching:
    m = Matching(m)
    if not m <= g.edges:
        raise NotAnMCMError("matching uses edges that are not in the graph")
    if len(m) != mcm_size(g):
        raise NotAnMCMError(f"matching of size {len(m)} is not maximum")
    return m


def solve_bap(g: WeightedBipartiteGraph, m0: Optional[Iterable[Edge]] = None) -> BottleneckCertificate:
    """Solve the bottleneck assignment problem by descending from an MCM.

    Starting from ``m0`` (default: :func:`maximum_cardinality_matching`), the
    heaviest matched edge is repeatedly replaced through an augmenting path
    that uses only strictly lighter edges. When no such path exists the edge
    is a critical bottleneck edge and the current matching is optimal.
    """
    _require_saturating(g)
    m0 = maximum_cardinality_matching(g) if m0 is None else _require_mcm(g, m0)
    agent_match, task_match = g.match_arrays(m0)
    (i, j), iterations = bap_descent(g.matrix, g.mask, agent_match, task_match)
    return BottleneckCertificate(
        matching=g.matching_from_arrays(agent_match),
        bottleneck_weight=float(g.matrix[i, j]),
        bottleneck_edge=(g.agents[i], g.tasks[j]),
        iterations=iterations,
    )


def bottleneck_weight(g: WeightedBipartiteGraph) -> float:
    return solve_bap(g).bottleneck_weight


def is_critical_bottleneck_edge(g: WeightedBipartiteGraph, m: Iterable[Edge], e: Edge) -> bool:
    """Decide whether ``e``, a heaviest edge of the MCM ``m``, certifies that ``m`` is a bottleneck assignment.

    True iff ``m`` minus ``e`` cannot be grown back to full size using ``m``
    and the edges strictly lighter than ``e``.
    """
    m = Matching(m)
    weights = g.weights_of(m)
    top = max(weights.values(), default=None)
    if e not in m or weights[e] != top:
        raise InvalidInstance(f"edge {e} is not a heaviest edge of the matching")
    agent_match, task_match = g.match_arrays(m)
    allowed = (g.mask & (g.matrix < top)) | matching_mask(g.mask.shape, agent_match)
    return not has_augmenting_path_without(allowed, agent_match, task_match, g.edge_indices(e))


def has_positive_price(g: WeightedBipartiteGraph, m: Iterable[Edge], e: Edge) -> bool:
    """Decide whether ``e`` has a positive price of absence without solving a second BAP.

    ``m`` must be a bottleneck assignment of ``g``. An edge outside ``m``
    never has a positive price; an edge of ``m`` has one iff the sublevel set
    of ``m`` minus ``e`` holds no augmenting path relative to ``m \\ {e}``.
    """
    m = _require_mcm(g, m)
    if e not in m:
        return False
    agent_match, task_match = g.match_arrays(m)
    level = max(g.weight(x) for x in m)
    psi = g.mask & (g.matrix <= level)
    return not has_augmenting_path_without(psi, agent_match, task_match, g.edge_indices(e))


def price_of_absence(g: WeightedBipartiteGraph, e: Edge) -> PriceOfAbsence:
    """Definitional price of absence: solve the BAP again without ``e``."""
    _require_saturating(g)
    g.weight(e)
    reduced = g.without_edge(e)
    if mcm_size(reduced) < len(g.tasks):
        return PriceOfAbsence(math.inf)
    return PriceOfAbsence(bottleneck_weight(reduced) - bottleneck_weight(g))
