"""Weighted bipartite graphs, matchings and augmenting paths.

Agents and tasks are identified by integers. The two sides live in separate
namespaces: an edge is always the pair ``(agent, task)``, so agent ``3`` and
task ``3`` are different vertices.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import InvalidInstance

Edge = tuple[int, int]

INSTANCE_HEADER = ("agent", "task", "weight")


class Matching(frozenset):
    """A set of ``(agent, task)`` edges with no shared endpoint.

    Set operations on a ``Matching`` return plain frozensets; wrap the result
    in ``Matching(...)`` again to re-check the invariant.
    """

    def __new__(cls, edges: Iterable[Edge] = ()):
        self = super().__new__(cls, ((int(a), int(t)) for a, t in edges))
        if len({a for a, _ in self}) != len(self) or len({t for _, t in self}) != len(self):
            raise InvalidInstance(f"not a matching: {sorted(self)}")
        return self

    @property
    def agents(self) -> frozenset:
        return frozenset(a for a, _ in self)

    @property
    def tasks(self) -> frozenset:
        return frozenset(t for _, t in self)

    def task_of(self, agent: int) -> Optional[int]:
        for a, t in self:
            if a == agent:
                return t
        return None

    def __repr__(self) -> str:
        return f"Matching({sorted(self)})"


class WeightTuple(tuple):
    """Weights of a matching sorted in non-increasing order.

    Ordinary tuple comparison is exactly the lexicographic order used by the
    LexBAP, e.g. ``(5, 3, 3, 3) < (5, 4, 3, 2)``.
    """

    def __new__(cls, values: Iterable[float] = ()):
        self = super().__new__(cls, values)
        if any(self[k] < self[k + 1] for k in range(len(self) - 1)):
            raise InvalidInstance(f"weight tuple is not non-increasing: {tuple(self)}")
        return self

    @classmethod
    def of(cls, g: "WeightedBipartiteGraph", matching: Iterable[Edge]) -> "WeightTuple":
        return cls(sorted((g.weight(e) for e in matching), reverse=True))


class WeightedBipartiteGraph:
    """Bipartite graph between agents and tasks with a real weight per edge.

    Args:
        weights: mapping from ``(agent, task)`` to a finite weight.
        agents: optional agent identifiers; defaults to the agents that
            appear in ``weights``. Isolated agents must be listed here.
        tasks: same, for tasks.

    Besides the edge dictionary the graph keeps a dense ``matrix`` view
    (rows follow ``agents``, columns follow ``tasks``, ``inf`` where there is
    no edge) and a boolean ``mask`` of present edges, both used by the
    solvers.
    """

    def __init__(
        self,
        weights: Mapping[Edge, float],
        agents: Optional[Iterable[int]] = None,
        tasks: Optional[Iterable[int]] = None,
    ):
        clean: dict[Edge, float] = {}
        for (a, t), w in weights.items():
            w = float(w)
            if not math.isfinite(w):
                raise InvalidInstance(f"weight of edge {(a, t)} is not finite: {w}")
            clean[(int(a), int(t))] = w
        edge_agents = {a for a, _ in clean}
        edge_tasks = {t for _, t in clean}
        agent_set = edge_agents if agents is None else {int(a) for a in agents}
        task_set = edge_tasks if tasks is None else {int(t) for t in tasks}
        if not edge_agents <= agent_set or not edge_tasks <= task_set:
            raise InvalidInstance("edge endpoint outside the given agent/task sets")

        self.agents: tuple[int, ...] = tuple(sorted(agent_set))
        self.tasks: tuple[int, ...] = tuple(sorted(task_set))
        self._weights = clean
        self.agent_index = {a: i for i, a in enumerate(self.agents)}
        self.task_index = {t: j for j, t in enumerate(self.tasks)}

        self.matrix = np.full((len(self.agents), len(self.tasks)), np.inf)
        for (a, t), w in clean.items():
            self.matrix[self.agent_index[a], self.task_index[t]] = w
        self.mask = np.isfinite(self.matrix)
        self.matrix.flags.writeable = False
        self.mask.flags.writeable = False

    @classmethod
    def from_matrix(
        cls,
        matrix,
        agents: Optional[Iterable[int]] = None,
        tasks: Optional[Iterable[int]] = None,
    ) -> "WeightedBipartiteGraph":
        """Build a graph from a 2-D array; non-finite entries mean "no edge"."""
        matrix = np.asarray(matrix, dtype=float)
        agents = list(range(matrix.shape[0])) if agents is None else list(agents)
        tasks = list(range(matrix.shape[1])) if tasks is None else list(tasks)
        weights = {
            (agents[i], tasks[j]): matrix[i, j]
            for i in range(matrix.shape[0])
            for j in range(matrix.shape[1])
            if np.isfinite(matrix[i, j])
        }
        return cls(weights, agents, tasks)

    @property
    def edges(self) -> frozenset:
        return frozenset(self._weights)

    @property
    def weights(self) -> dict[Edge, float]:
        return dict(self._weights)

    def weight(self, e: Edge) -> float:
        try:
            return self._weights[e]
        except KeyError:
            raise InvalidInstance(f"edge {e} is not in the graph") from None

    def weights_of(self, edges: Iterable[Edge]) -> dict[Edge, float]:
        return {e: self.weight(e) for e in edges}

    def __contains__(self, e) -> bool:
        return e in self._weights

    def __len__(self) -> int:
        return len(self._weights)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedBipartiteGraph):
            return NotImplemented
        return (self.agents, self.tasks, self._weights) == (other.agents, other.tasks, other._weights)

    def __repr__(self) -> str:
        return f"WeightedBipartiteGraph({len(self.agents)} agents, {len(self.tasks)} tasks, {len(self)} edges)"

    def incident(self, agent: int) -> dict[Edge, float]:
        return {e: w for e, w in self._weights.items() if e[0] == agent}

    def subgraph(self, agents: Iterable[int], tasks: Iterable[int]) -> "WeightedBipartiteGraph":
        """Induced subgraph on the given agents and tasks."""
        agents, tasks = set(agents), set(tasks)
        weights = {e: w for e, w in self._weights.items() if e[0] in agents and e[1] in tasks}
        return WeightedBipartiteGraph(weights, agents, tasks)

    def without_edge(self, e: Edge) -> "WeightedBipartiteGraph":
        weights = dict(self._weights)
        weights.pop(e, None)
        return WeightedBipartiteGraph(weights, self.agents, self.tasks)

    def distinct_weights(self) -> bool:
        return len(set(self._weights.values())) == len(self._weights)

    # index-space helpers used by the solvers

    def match_arrays(self, m: Iterable[Edge]) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(task index per agent, agent index per task)``, -1 if free."""
        agent_match = np.full(len(self.agents), -1, dtype=np.int64)
        task_match = np.full(len(self.tasks), -1, dtype=np.int64)
        for a, t in m:
            if (a, t) not in self._weights:
                raise InvalidInstance(f"matching edge {(a, t)} is not in the graph")
            i, j = self.agent_index[a], self.task_index[t]
            agent_match[i] = j
            task_match[j] = i
        return agent_match, task_match

    def matching_from_arrays(self, agent_match: np.ndarray) -> Matching:
        return Matching(
            (self.agents[i], self.tasks[j]) for i, j in enumerate(agent_match.tolist()) if j >= 0
        )

    def edge_indices(self, e: Edge) -> tuple[int, int]:
        if e not in self._weights:
            raise InvalidInstance(f"edge {e} is not in the graph")
        return self.agent_index[e[0]], self.task_index[e[1]]


# augmenting paths


def find_augmenting_path(
    allowed: np.ndarray, agent_match: np.ndarray, task_match: np.ndarray
) -> Optional[list[tuple[int, int]]]:
    """Layered breadth-first search for an augmenting path in index space.

    The search starts from every free agent at once, in ascending index
    order. Each layer expands its agents in order, and each agent its tasks in
    ascending index order; a task is claimed by the first agent that reaches
    it. The search stops at the first free task discovered.

    Returns the path as ``(agent, task)`` index pairs, starting with the
    non-matching edge that ends in the free task, or ``None``.
    """
    has_edge = allowed.any(axis=1)
    frontier = np.flatnonzero((agent_match < 0) & has_edge)
    if frontier.size == 0:
        return None
    visited = np.zeros(allowed.shape[1], dtype=bool)
    parent = np.full(allowed.shape[1], -1, dtype=np.int64)
    while frontier.size:
        reach = allowed[frontier] & ~visited
        hit = reach.any(axis=0)
        if not hit.any():
            return None
        tasks = np.flatnonzero(hit)
        first = reach[:, tasks].argmax(axis=0)
        order = np.lexsort((tasks, first))
        tasks, first = tasks[order], first[order]
        parent[tasks] = frontier[first]
        visited[tasks] = True
        owners = task_match[tasks]
        free = np.flatnonzero(owners < 0)
        if free.size:
            return _trace_back(int(tasks[free[0]]), parent, agent_match)
        frontier = owners
    return None


def _trace_back(task: int, parent: np.ndarray, agent_match: np.ndarray) -> list[tuple[int, int]]:
    path = []
    while True:
        agent = int(parent[task])
        path.append((agent, task))
        previous = int(agent_match[agent])
        if previous < 0:
            return path
        path.append((agent, previous))
        task = previous


def apply_path(path: list[tuple[int, int]], agent_match: np.ndarray, task_match: np.ndarray) -> None:
    """Flip the matching along ``path`` in place (symmetric difference)."""
    for agent, task in path[::2]:
        agent_match[agent] = task
        task_match[task] = agent


def mcm_arrays(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Maximum cardinality matching of a boolean adjacency matrix, in index space.

    Agents are first matched greedily to their lowest free task, then the
    matching is grown by augmenting paths until none is left.
    """
    n_agents, n_tasks = mask.shape
    agent_match = np.full(n_agents, -1, dtype=np.int64)
    task_match = np.full(n_tasks, -1, dtype=np.int64)
    free_tasks = np.ones(n_tasks, dtype=bool)
    for i in range(n_agents):
        options = mask[i] & free_tasks
        if options.any():
            j = int(options.argmax())
            agent_match[i], task_match[j] = j, i
            free_tasks[j] = False
    while (path := find_augmenting_path(mask, agent_match, task_match)) is not None:
        apply_path(path, agent_match, task_match)
    return agent_match, task_match


def maximum_cardinality_matching(g: WeightedBipartiteGraph) -> Matching:
    """A maximum cardinality matching of ``g``; deterministic for a given graph."""
    agent_match, _ = mcm_arrays(g.mask)
    return g.matching_from_arrays(agent_match)


def augmenting_path_restore(m_minus: Iterable[Edge], allowed_edges: Iterable[Edge]) -> Matching:
    """Grow ``m_minus`` by one edge along an augmenting path inside ``allowed_edges``.

    Returns ``m_minus`` unchanged when no augmenting path exists. The search
    order is that of :func:`find_augmenting_path` with vertices ordered by
    identifier.
    """
    m_minus = Matching(m_minus)
    allowed_edges = frozenset(allowed_edges)
    if not m_minus <= allowed_edges:
        raise InvalidInstance("m_minus is not contained in the allowed edge set")
    local = WeightedBipartiteGraph({e: 0.0 for e in allowed_edges})
    agent_match, task_match = local.match_arrays(m_minus)
    path = find_augmenting_path(local.mask, agent_match, task_match)
    if path is None:
        return m_minus
    apply_path(path, agent_match, task_match)
    return local.matching_from_arrays(agent_match)


# sublevel sets


def _max_matching_weight(g: WeightedBipartiteGraph, m: Iterable[Edge]) -> float:
    m = list(m)
    if not m:
        raise InvalidInstance("sublevel set of an empty matching is undefined")
    return max(g.weight(e) for e in m)


def sublevel_set(g: WeightedBipartiteGraph, m: Iterable[Edge]) -> frozenset:
    """Edges of ``g`` no heavier than the heaviest edge of ``m``."""
    level = _max_matching_weight(g, m)
    return frozenset(e for e, w in g.weights.items() if w <= level)


def strict_sublevel_set(g: WeightedBipartiteGraph, m: Iterable[Edge]) -> frozenset:
    """Edges of ``g`` strictly lighter than the heaviest edge of ``m``."""
    level = _max_matching_weight(g, m)
    return frozenset(e for e, w in g.weights.items() if w < level)


def max_weight_edges(weighted_edges: Mapping[Edge, float]) -> frozenset:
    """All edges attaining the maximum weight (exact float equality)."""
    if not weighted_edges:
        raise InvalidInstance("max_weight_edges of an empty edge set")
    top = max(weighted_edges.values())
    return frozenset(e for e, w in weighted_edges.items() if w == top)


# paths


def _vertices(e: Edge) -> tuple[tuple[str, int], tuple[str, int]]:
    return ("A", e[0]), ("T", e[1])


@dataclass(frozen=True)
class Path:
    """A simple path given as a set of edges."""

    edges: frozenset

    def __post_init__(self):
        edges = frozenset((int(a), int(t)) for a, t in self.edges)
        object.__setattr__(self, "edges", edges)
        if not edges:
            raise InvalidInstance("a path needs at least one edge")
        degree: dict[tuple[str, int], int] = {}
        for e in edges:
            for v in _vertices(e):
                degree[v] = degree.get(v, 0) + 1
        ends = [v for v, d in degree.items() if d == 1]
        if max(degree.values()) > 2 or len(ends) != 2 or len(degree) != len(edges) + 1:
            raise InvalidInstance(f"edges do not form a simple path: {sorted(edges)}")
        if len(self.vertex_sequence()) != len(degree):
            raise InvalidInstance(f"edges do not form a connected path: {sorted(edges)}")

    @classmethod
    def of(cls, *edges: Edge) -> "Path":
        return cls(frozenset(edges))

    def __len__(self) -> int:
        return len(self.edges)

    def endpoints(self) -> tuple[tuple[str, int], tuple[str, int]]:
        seq = self.vertex_sequence()
        return seq[0], seq[-1]

    def vertex_sequence(self) -> list[tuple[str, int]]:
        """Vertices in path order, starting from the smaller endpoint."""
        adjacent: dict[tuple[str, int], list[tuple[str, int]]] = {}
        for e in self.edges:
            u, v = _vertices(e)
            adjacent.setdefault(u, []).append(v)
            adjacent.setdefault(v, []).append(u)
        start = min(v for v, nb in adjacent.items() if len(nb) == 1)
        seq, previous = [start], None
        while True:
            step = [v for v in adjacent[seq[-1]] if v != previous]
            if not step or step[0] in seq:
                return seq
            previous = seq[-1]
            seq.append(step[0])

    def edge_sequence(self) -> list[Edge]:
        seq = self.vertex_sequence()
        out = []
        for u, v in zip(seq, seq[1:]):
            a, t = (u, v) if u[0] == "A" else (v, u)
            out.append((a[1], t[1]))
        return out


def is_alternating_path(p: Path, m: Iterable[Edge]) -> bool:
    """No vertex of ``p`` touches two matched or two unmatched path edges."""
    m = frozenset(m)
    in_m: dict[tuple[str, int], int] = {}
    out_m: dict[tuple[str, int], int] = {}
    for e in p.edges:
        counter = in_m if e in m else out_m
        for v in _vertices(e):
            counter[v] = counter.get(v, 0) + 1
    return all(c <= 1 for c in in_m.values()) and all(c <= 1 for c in out_m.values())


def is_augmenting_path(p: Path, m: Iterable[Edge]) -> bool:
    """Alternating path whose two endpoints are free with respect to ``m``."""
    m = frozenset(m)
    if not is_alternating_path(p, m):
        return False
    matched = {v for e in m for v in _vertices(e)}
    return all(v not in matched for v in p.endpoints())


# instance files


def format_instance(g: WeightedBipartiteGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(INSTANCE_HEADER)
    for (a, t), w in sorted(g.weights.items()):
        writer.writerow((f"A{a}", f"T{t}", repr(w)))
    return buf.getvalue()


def parse_instance(text: str) -> WeightedBipartiteGraph:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != INSTANCE_HEADER:
        raise InvalidInstance("instance must start with the header 'agent,task,weight'")
    weights: dict[Edge, float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            agent, task, weight = (c.strip() for c in row)
            if agent[:1] != "A" or task[:1] != "T":
                raise ValueError("identifiers must look like A<int> and T<int>")
            e = (int(agent[1:]), int(task[1:]))
            w = float(weight)
        except ValueError as exc:
            raise InvalidInstance(f"line {lineno}: {exc}") from None
        if e in weights:
            raise InvalidInstance(f"line {lineno}: duplicate edge {agent},{task}")
        weights[e] = w
    return WeightedBipartiteGraph(weights)


def read_instance(path) -> WeightedBipartiteGraph:
    with open(path, encoding="utf-8") as f:
        return parse_instance(f.read())


def write_instance(g: WeightedBipartiteGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(format_instance(g))
