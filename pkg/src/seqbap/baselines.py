"""Reference solvers: exhaustive enumeration, exact LexBAP via LSAP, naive greedy SeqBAP."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .bottleneck import (
    _require_saturating,
    bap_descent,
    has_augmenting_path_without,
)
from .errors import EnumerationLimitError, InfeasibleError, InvalidInstance
from .graph import Edge, Matching, WeightedBipartiteGraph, WeightTuple, mcm_arrays

ENUMERATION_CAP = 7


# brute force


def _task_neighbours(g: WeightedBipartiteGraph) -> dict[int, list[int]]:
    return {t: [a for a in g.agents if (a, t) in g] for t in g.tasks}


def _max_matching_size(g: WeightedBipartiteGraph, neighbours: dict[int, list[int]]) -> int:
    tasks = g.tasks
    best = 0

    def grow(k: int, used: frozenset, size: int) -> None:
        nonlocal best
        if size + len(tasks) - k <= best:
            return
        if k == len(tasks):
            best = size
            return
        for a in neighbours[tasks[k]]:
            if a not in used:
                grow(k + 1, used | {a}, size + 1)
        grow(k + 1, used, size)

    grow(0, frozenset(), 0)
    return best


def all_mcms(g: WeightedBipartiteGraph, cap: int = ENUMERATION_CAP) -> list[Matching]:
    """Every maximum cardinality matching of ``g``, by exhaustive search over tasks."""
    if len(g.tasks) > cap:
        raise EnumerationLimitError(f"{len(g.tasks)} tasks exceed the enumeration cap of {cap}")
    neighbours = _task_neighbours(g)
    size = _max_matching_size(g, neighbours)
    tasks = g.tasks
    found: list[Matching] = []
    chosen: list[Edge] = []

    def extend(k: int, used: set, skips: int) -> None:
        if k == len(tasks):
            found.append(Matching(chosen))
            return
        t = tasks[k]
        for a in neighbours[t]:
            if a not in used:
                used.add(a)
                chosen.append((a, t))
                extend(k + 1, used, skips)
                chosen.pop()
                used.discard(a)
        if skips:
            extend(k + 1, used, skips - 1)

    extend(0, set(), len(tasks) - size)
    return found


def brute_force_bottleneck_weight(g: WeightedBipartiteGraph, cap: int = ENUMERATION_CAP) -> float:
    return min(max((g.weight(e) for e in m), default=float("-inf")) for m in all_mcms(g, cap))


@dataclass(frozen=True)
class SolutionSetReport:
    """Exact solution sets of the BAP and the LexBAP for a small graph."""

    bap_solutions: frozenset
    lexbap_solutions: frozenset
    lex_min_tuple: WeightTuple
    bottleneck_weight: float


def brute_force_enumerate(g: WeightedBipartiteGraph, cap: int = ENUMERATION_CAP) -> SolutionSetReport:
    """Enumerate all MCMs and keep the min-max and the lexicographically minimal ones."""
    mcms = all_mcms(g, cap)
    tuples = {m: WeightTuple.of(g, m) for m in mcms}
    top = min((t[0] if t else float("-inf")) for t in tuples.values())
    lex_min = min(tuples.values())
    return SolutionSetReport(
        bap_solutions=frozenset(m for m, t in tuples.items() if (t[0] if t else float("-inf")) == top),
        lexbap_solutions=frozenset(m for m, t in tuples.items() if t == lex_min),
        lex_min_tuple=lex_min,
        bottleneck_weight=top,
    )


# exact LexBAP


def _hungarian(a: list[list[int]], n_rows: int) -> tuple[list[int], list[int], list[int]]:
    """Shortest augmenting paths with potentials, one column at a time.

    ``a[c][r]`` is the cost of giving column ``c`` to row ``r``. Returns
    ``(owner, u, v)`` where ``owner[r]`` is the 1-based column held by row
    ``r`` (0 if none) and ``u``/``v`` are column and row potentials, both
    1-based. Reduced costs ``a[c][r] - u[c+1] - v[r+1]`` are non-negative and
    zero on assigned pairs.
    """
    n_cols = len(a)
    inf = float("inf")
    u = [0] * (n_cols + 1)
    v = [0] * (n_rows + 1)
    owner = [0] * (n_rows + 1)
    way = [0] * (n_rows + 1)
    for col in range(1, n_cols + 1):
        owner[0] = col
        j0 = 0
        minv = [inf] * (n_rows + 1)
        used = [False] * (n_rows + 1)
        while True:
            used[j0] = True
            i0 = owner[j0]
            row, ui0 = a[i0 - 1], u[i0]
            delta, j1 = inf, 0
            for j in range(1, n_rows + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta, j1 = minv[j], j
            for j in range(n_rows + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    return owner, u, v


def _lsap_with_potentials(
    cost: Sequence[Sequence[Optional[int]]],
) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    rows = [list(r) for r in cost]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    if any(len(r) != n_cols for r in rows):
        raise InvalidInstance("cost matrix rows have different lengths")
    if n_cols > n_rows:
        raise InvalidInstance("cost matrix needs at least as many rows as columns")
    if n_cols == 0:
        return [], [], []
    finite = [c for r in rows for c in r if c is not None]
    if any(int(c) != c or c < 0 for c in finite):
        raise InvalidInstance("costs must be non-negative integers")
    forbidden = 1 + n_cols * max(finite, default=0)
    a = [[forbidden if rows[r][c] is None else int(rows[r][c]) for r in range(n_rows)] for c in range(n_cols)]
    owner, u, v = _hungarian(a, n_rows)
    pairs = [(r - 1, owner[r] - 1) for r in range(1, n_rows + 1) if owner[r]]
    if any(rows[r][c] is None for r, c in pairs):
        raise InfeasibleError("every assignment uses a forbidden pair")
    return pairs, u[1:], v[1:]


def solve_lsap(cost: Sequence[Sequence[Optional[int]]]) -> Matching:
    """Minimum-cost assignment of every column to a distinct row, in exact integer arithmetic.

    Args:
        cost: ``rows x columns`` matrix of non-negative integers with at least
            as many rows as columns; ``None`` marks a forbidden pair.

    Returns:
        A matching of ``(row, column)`` index pairs covering every column.

    Raises:
        InfeasibleError: if no assignment avoids the forbidden pairs.
    """
    pairs, _, _ = _lsap_with_potentials(cost)
    return Matching(pairs)


def lexicographic_costs(g: WeightedBipartiteGraph) -> list[list[Optional[int]]]:
    """Integer costs ``(n+1) ** rank(w)`` whose sum orders matchings lexicographically.

    ``rank`` is the dense rank of the weight among the distinct weights of
    ``g`` (ascending) and ``n`` the number of tasks. A matching has at most
    ``n`` edges of any one rank, so sums never carry into the next power and
    comparing sums compares sorted weight tuples.
    """
    base = len(g.tasks) + 1
    rank = {w: r for r, w in enumerate(sorted(set(g.weights.values())))}
    return [
        [base ** rank[g.weight((a, t))] if (a, t) in g else None for t in g.tasks]
        for a in g.agents
    ]


def solve_lexbap_exact(g: WeightedBipartiteGraph) -> Matching:
    """Exact LexBAP solution through one LSAP on rank-encoded integer costs."""
    _require_saturating(g)
    pairs = solve_lsap(lexicographic_costs(g))
    return Matching((g.agents[r], g.tasks[c]) for r, c in pairs)


def solve_lexbap_iterative(g: WeightedBipartiteGraph) -> Matching:
    """Exact LexBAP solution by alternating a BAP and an LSAP, one weight level at a time.

    Each round solves the BAP of the current graph from scratch to get the
    bottleneck weight ``z``, drops heavier edges, and solves an LSAP that
    counts the edges of weight ``z``. Edges with positive reduced cost under
    the optimal potentials lie in no optimal assignment and are dropped; the
    perfect matchings that remain are exactly those using the fewest edges of
    weight ``z``. That level is then settled and the next round looks below it.
    Each round settles at least one position of the weight tuple, so there
    are at most ``n`` rounds.

    Extra agents are absorbed by dummy tasks so that the assignment is square,
    which makes the reduced-cost filter exact.
    """
    _require_saturating(g)
    n_agents, n_tasks = len(g.agents), len(g.tasks)
    weights = np.full((n_agents, n_agents), -np.inf)
    weights[:, :n_tasks] = g.matrix
    active = np.ones((n_agents, n_agents), dtype=bool)
    active[:, :n_tasks] = g.mask
    settled = np.zeros_like(active)
    while True:
        effective = np.where(settled, -np.inf, weights)
        agent_match, task_match = mcm_arrays(active)
        critical, _ = bap_descent(effective, active, agent_match, task_match)
        level = effective[critical]
        if level == -np.inf:
            break
        active &= effective <= level
        cost = [
            [None if not active[i, j] else int(effective[i, j] == level) for j in range(n_agents)]
            for i in range(n_agents)
        ]
        pairs, u, v = _lsap_with_potentials(cost)
        reduced = np.array([[c if c is not None else 0 for c in row] for row in cost], dtype=np.int64)
        reduced -= np.asarray(u, dtype=np.int64)[None, :] + np.asarray(v, dtype=np.int64)[:, None]
        active &= reduced == 0
        settled |= active & (effective == level)
    return Matching((g.agents[i], g.tasks[j]) for i, j in enumerate(agent_match) if j < n_tasks)


# naive greedy SeqBAP


def solve_naive_greedy(g: WeightedBipartiteGraph) -> Matching:
    """Greedy SeqBAP that solves a fresh BAP for every selected edge.

    Each step computes an MCM of the remaining graph from scratch, descends
    to a bottleneck assignment, and selects the lowest-identifier heaviest
    edge with a positive price of absence (or the critical edge if there is
    none). Both endpoints of the selected edge are then removed.
    """
    _require_saturating(g)
    agents = np.ones(len(g.agents), dtype=bool)
    tasks = np.ones(len(g.tasks), dtype=bool)
    chosen: list[Edge] = []
    while tasks.any():
        rows, cols = np.flatnonzero(agents), np.flatnonzero(tasks)
        weights = g.matrix[np.ix_(rows, cols)]
        mask = g.mask[np.ix_(rows, cols)]
        agent_match, task_match = mcm_arrays(mask)
        if (task_match < 0).any():
            raise InfeasibleError("remaining tasks cannot all be matched")
        critical, _ = bap_descent(weights, mask, agent_match, task_match)
        level = weights[critical]
        psi = mask & (weights <= level)
        heaviest = [
            (int(i), int(agent_match[i]))
            for i in np.flatnonzero(agent_match >= 0)
            if weights[i, agent_match[i]] == level
        ]
        pick = next(
            (e for e in heaviest if not has_augmenting_path_without(psi, agent_match, task_match, e)),
            critical,
        )
        i, j = int(rows[pick[0]]), int(cols[pick[1]])
        chosen.append((g.agents[i], g.tasks[j]))
        agents[i] = tasks[j] = False
    return Matching(chosen)


def weight_tuple(g: WeightedBipartiteGraph, m: Iterable[Edge]) -> WeightTuple:
    return WeightTuple.of(g, m)
