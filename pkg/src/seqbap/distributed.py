"""Synchronous message-passing execution of the SeqBAP solver.

Agents only see the weights of their own incident edges and talk to their
neighbours in a fixed communication graph, in lockstep rounds. Everything an
agent needs to know about the rest of the system reaches it through floods:
a flood lasts ``D`` rounds (the diameter of the communication graph), and in
each round every agent forwards what it knows to all of its neighbours.

Four kinds of flood are used:

* ``init``: every agent announces its initially matched task.
* ``max``: max-consensus on the heaviest matched edge.
* ``augment``: one layer of a breadth-first augmenting-path search; the
  frontier agents announce the unvisited tasks they can reach.
* ``lock``: agents in a locked batch report whether they hold a heaviest edge.

Every agent keeps its own replica of the matching and of the search state and
updates it from flooded messages with the same deterministic rules as the
centralised search, so the run reproduces :func:`solve_seqbap` exactly. Edge
removal is local and free. A flood is charged ``D`` clock steps whether or
not information settles earlier, so the clock is exactly linear in ``D``.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .bottleneck import _require_mcm, _require_saturating
from .engine import Batch, SeqBapResult
from .errors import DisconnectedTopology, InvalidInstance
from .graph import Edge, Matching, WeightedBipartiteGraph, maximum_cardinality_matching


# communication graph


@dataclass(frozen=True)
class CommGraph:
    """Undirected, connected communication graph over agent identifiers.

    Build instances with :meth:`from_links`, which checks connectivity and
    computes the diameter. A single agent has diameter 1 so that every flood
    costs at least one step.
    """

    nodes: tuple
    links: frozenset
    diameter: int
    neighbours: Mapping[int, tuple] = field(repr=False, compare=False)

    @classmethod
    def from_links(cls, nodes: Iterable[int], links: Iterable[tuple[int, int]]) -> "CommGraph":
        nodes = tuple(sorted(set(nodes)))
        if not nodes:
            raise InvalidInstance("communication graph needs at least one agent")
        known = set(nodes)
        canon = set()
        for a, b in links:
            if a == b:
                raise InvalidInstance(f"self-link on agent {a}")
            if a not in known or b not in known:
                raise InvalidInstance(f"link ({a}, {b}) names an unknown agent")
            canon.add((min(a, b), max(a, b)))
        adjacency: dict[int, set] = {v: set() for v in nodes}
        for a, b in canon:
            adjacency[a].add(b)
            adjacency[b].add(a)
        neighbours = {v: tuple(sorted(adjacency[v])) for v in nodes}
        diameter = max(1, _diameter(nodes, neighbours))
        return cls(nodes, frozenset(canon), diameter, neighbours)

    def __contains__(self, link: tuple[int, int]) -> bool:
        a, b = link
        return (min(a, b), max(a, b)) in self.links


def _diameter(nodes: Sequence[int], neighbours: Mapping[int, tuple]) -> int:
    longest = 0
    for source in nodes:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in neighbours[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        if len(dist) < len(nodes):
            missing = min(set(nodes) - dist.keys())
            raise DisconnectedTopology(f"agent {missing} cannot be reached from agent {source}")
        longest = max(longest, max(dist.values()))
    return longest


def complete_comm_graph(nodes: Iterable[int]) -> CommGraph:
    nodes = sorted(set(nodes))
    return CommGraph.from_links(nodes, [(a, b) for k, a in enumerate(nodes) for b in nodes[k + 1 :]])


def build_comm_graph_radius(positions: Mapping[int, Sequence[float]], radius: float) -> CommGraph:
    """Link every pair of agents whose Euclidean distance is at most ``radius``.

    Raises:
        DisconnectedTopology: if the resulting graph is not connected.
    """
    ids = sorted(positions)
    pts = {a: np.asarray(positions[a], dtype=float) for a in ids}
    links = [
        (a, b)
        for k, a in enumerate(ids)
        for b in ids[k + 1 :]
        if float(np.linalg.norm(pts[a] - pts[b])) <= radius
    ]
    try:
        return CommGraph.from_links(ids, links)
    except DisconnectedTopology as exc:
        raise DisconnectedTopology(f"{exc}; radius {radius} is too small, try a larger one") from None


def read_comm_links(text: str, nodes: Optional[Iterable[int]] = None) -> CommGraph:
    """Parse a ``agent_a,agent_b`` CSV link list."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["agent_a", "agent_b"]:
        raise InvalidInstance("link list must start with the header 'agent_a,agent_b'")
    links = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            a, b = (int(c) for c in row)
        except ValueError:
            raise InvalidInstance(f"line {lineno}: expected two integer agent ids") from None
        links.append((a, b))
    endpoints = {v for link in links for v in link}
    return CommGraph.from_links(endpoints | set(nodes or ()), links)


# trace


class FloodRecord(NamedTuple):
    primitive: str
    steps: int
    messages: int


@dataclass
class SimTrace:
    diameter: int
    rounds_log: list = field(default_factory=list)

    @property
    def clock_steps(self) -> int:
        return sum(r.steps for r in self.rounds_log)

    @property
    def messages_sent(self) -> int:
        return sum(r.messages for r in self.rounds_log)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rounds_log:
            out[r.primitive] = out.get(r.primitive, 0) + 1
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["round", "primitive", "steps", "messages"])
        for k, r in enumerate(self.rounds_log):
            writer.writerow([k, r.primitive, r.steps, r.messages])
        return buf.getvalue()


# agents


@dataclass
class AgentLocalView:
    """What a single agent knows about the assignment graph: its own edges."""

    agent: int
    incident_edges: frozenset
    local_weights: dict
    matched_task: Optional[int] = None
    mailbox: list = field(default_factory=list)


def local_views(g: WeightedBipartiteGraph, matching: Iterable[Edge] = ()) -> list[AgentLocalView]:
    """One view per agent, in agent order, holding its incident edges and matched task."""
    tasks = dict(matching)
    return [
        AgentLocalView(
            agent=a,
            incident_edges=frozenset(g.incident(a)),
            local_weights=dict(g.incident(a)),
            matched_task=tasks.get(a),
        )
        for a in g.agents
    ]


class _Agent:
    """One agent's program state: its local view plus replicas of shared state."""

    def __init__(self, view: AgentLocalView, index: int, n_agents: int, task_index: Mapping[int, int]):
        self.view = view
        self.index = index
        n_tasks = len(task_index)
        self.weights = np.full(n_tasks, np.inf)
        for (_, t), w in view.local_weights.items():
            self.weights[task_index[t]] = w
        self.alive = np.isfinite(self.weights)
        self.ebar = self.alive.copy()
        self.agent_match = np.full(n_agents, -1, dtype=np.int64)
        self.task_match = np.full(n_tasks, -1, dtype=np.int64)
        # replicated search state
        self.visited = np.zeros(n_tasks, dtype=bool)
        self.parent = np.full(n_tasks, -1, dtype=np.int64)
        self.frontier: list[int] = []
        self.allowed: Optional[np.ndarray] = None

    @property
    def matched(self) -> int:
        return int(self.agent_match[self.index])


class _Network:
    def __init__(self, comm: CommGraph, early_termination: bool):
        self.comm = comm
        self.ids = comm.nodes
        self.early_termination = early_termination
        self.trace = SimTrace(comm.diameter)

    def _send(self, sender: int, recipient: int, payload, inboxes: dict) -> None:
        assert recipient in self.comm.neighbours[sender], f"agent {sender} is not linked to agent {recipient}"
        inboxes[recipient].append(payload)

    def flood(self, primitive: str, agents: Sequence[_Agent], initial: Sequence, merge: Callable):
        """Run one flood and return what each agent knows afterwards.

        ``initial[k]`` is agent ``k``'s own contribution and ``merge(a, b)``
        combines two pieces of knowledge; it must be idempotent, commutative
        and associative.
        """
        known = list(initial)
        rounds = messages = 0
        while rounds < self.comm.diameter:
            inboxes: dict = {a: [] for a in self.ids}
            for k, a in enumerate(self.ids):
                for b in self.comm.neighbours[a]:
                    self._send(a, b, known[k], inboxes)
                    messages += 1
            updated = []
            for k, a in enumerate(self.ids):
                agents[k].view.mailbox = inboxes[a]
                value = known[k]
                for payload in inboxes[a]:
                    value = merge(value, payload)
                updated.append(value)
            rounds += 1
            settled = updated == known
            known = updated
            if self.early_termination and settled:
                break
        for agent in agents:
            agent.view.mailbox = []
        assert all(k == known[0] for k in known), f"{primitive} flood did not reach every agent"
        self.trace.rounds_log.append(FloodRecord(primitive, rounds, messages))
        return known[0]


def _union(a: frozenset, b: frozenset) -> frozenset:
    return a | b


def _max(a, b):
    return max(a, b)


def _or(a: bool, b: bool) -> bool:
    return a or b


# replicated primitives


def _resolve_layer(agent: _Agent, offers: frozenset):
    """Apply one flooded search layer to the agent's replica.

    ``offers`` holds ``(agent, tasks)`` pairs from the frontier. Returns
    ``"stop"`` when the search is exhausted, a path when a free task was
    reached, or None to continue with the next layer.
    """
    reach = dict(offers)
    if not agent.frontier:
        agent.frontier = sorted(reach)
    claims: dict[int, int] = {}
    for position, a in enumerate(agent.frontier):
        for t in reach.get(a, ()):
            claims.setdefault(t, position)
    if not claims:
        return "stop"
    order = sorted(claims, key=lambda t: (claims[t], t))
    for t in order:
        agent.parent[t] = agent.frontier[claims[t]]
        agent.visited[t] = True
    owners = [int(agent.task_match[t]) for t in order]
    for t, owner in zip(order, owners):
        if owner < 0:
            return _trace_back(agent, t)
    agent.frontier = owners
    return None


def _trace_back(agent: _Agent, task: int) -> list:
    path = []
    while True:
        a = int(agent.parent[task])
        path.append((a, task))
        previous = int(agent.agent_match[a])
        if previous < 0:
            return path
        path.append((a, previous))
        task = previous


def _search(net: _Network, agents: Sequence[_Agent], rows: Callable[[_Agent], np.ndarray], skip: Edge):
    """Distributed layered search for an augmenting path avoiding ``skip``.

    ``rows(agent)`` gives the agent's allowed edges; ``skip``'s endpoints are
    treated as free during the search. The replicas are left unchanged.
    Returns the path in index space or None.
    """
    i, j = skip
    for agent in agents:
        agent.agent_match[i], agent.task_match[j] = -1, -1
        agent.allowed = rows(agent).copy()
        if agent.index == i:
            agent.allowed[j] = False
        agent.visited[:] = False
        agent.parent[:] = -1
        agent.frontier = []
    outcome = None
    first = True
    while outcome is None:
        offers = []
        for agent in agents:
            on_frontier = agent.matched < 0 if first else agent.index in agent.frontier
            tasks = np.flatnonzero(agent.allowed & ~agent.visited) if on_frontier else ()
            offers.append(frozenset({(agent.index, tuple(int(t) for t in tasks))}) if len(tasks) else frozenset())
        merged = net.flood("augment", agents, offers, _union)
        outcomes = [_resolve_layer(agent, merged) for agent in agents]
        assert all(o == outcomes[0] for o in outcomes)
        outcome = outcomes[0]
        first = False
    for agent in agents:
        agent.agent_match[i], agent.task_match[j] = j, i
        agent.allowed = None
    return None if outcome == "stop" else outcome


def _apply(agents: Sequence[_Agent], path: list) -> None:
    for agent in agents:
        for a, t in path[::2]:
            agent.agent_match[a] = t
            agent.task_match[t] = a


def run_distributed_seqbap(
    g: WeightedBipartiteGraph,
    comm: CommGraph,
    m0: Optional[Iterable[Edge]] = None,
    early_termination: bool = False,
) -> tuple[SeqBapResult, SimTrace]:
    """Run the SeqBAP solver as a synchronous distributed algorithm.

    Args:
        g: assignment graph; every task must be matchable.
        comm: connected communication graph over exactly the agents of ``g``.
        m0: initial maximum cardinality matching, as in :func:`solve_seqbap`.
        early_termination: end a flood as soon as no agent learns anything
            new, instead of always running ``D`` rounds. Breaks the exact
            linear dependence of the clock on ``D``.

    Returns:
        The same result as :func:`solve_seqbap` on ``(g, m0)`` and the trace of
        charged floods.
    """
    _require_saturating(g)
    if set(comm.nodes) != set(g.agents):
        raise InvalidInstance("communication graph must span exactly the agents of the assignment graph")
    m0 = maximum_cardinality_matching(g) if m0 is None else _require_mcm(g, m0)
    views = local_views(g, m0)
    agents = [_Agent(v, k, len(g.agents), g.task_index) for k, v in enumerate(views)]
    net = _Network(comm, early_termination)

    announced = net.flood(
        "init",
        agents,
        [
            frozenset({(agent.index, g.task_index[agent.view.matched_task])})
            if agent.view.matched_task is not None
            else frozenset()
            for agent in agents
        ],
        _union,
    )
    for agent in agents:
        for a, t in announced:
            agent.agent_match[a], agent.task_match[t] = t, a

    exact = True
    locked: list[Edge] = []
    batches: list[Batch] = []
    iterations = 0
    while (agents[0].agent_match >= 0).any():
        iterations += 1
        # heaviest matched edge; ties go to the lowest agent index
        level, neg_i = net.flood(
            "max",
            agents,
            [(agent.weights[agent.matched], -agent.index) if agent.matched >= 0 else (-math.inf, 0) for agent in agents],
            _max,
        )
        i = -neg_i
        critical = (i, int(agents[0].agent_match[i]))
        for agent in agents:
            agent.ebar &= agent.weights < level
            if agent.matched >= 0:
                agent.ebar[agent.matched] = True
        path = _search(net, agents, lambda agent: agent.ebar, critical)
        if path is not None:
            for agent in agents:
                agent.agent_match[critical[0]] = agent.task_match[critical[1]] = -1
            _apply(agents, path)
            continue

        def psi(agent: _Agent) -> np.ndarray:
            return agent.alive & (agent.weights <= level)

        batch = []
        for agent_k in range(len(agents)):
            j = int(agents[0].agent_match[agent_k])
            if j < 0:
                continue
            if _search(net, agents, psi, (agent_k, j)) is None:
                batch.append((agent_k, j))
        in_batch = {a for a, _ in batch}
        hits_top = net.flood(
            "lock",
            agents,
            [agent.index in in_batch and agent.weights[agent.matched] == level for agent in agents],
            _or,
        )
        zero_price = not hits_top
        if zero_price:
            exact = False
            batch.append(critical)

        locked_agents = {a for a, _ in batch}
        for agent in agents:
            for a, t in batch:
                agent.agent_match[a] = agent.task_match[t] = -1
                agent.alive[t] = agent.ebar[t] = False
            if agent.index in locked_agents:
                agent.alive[:] = agent.ebar[:] = False
        as_ids = frozenset((g.agents[a], g.tasks[t]) for a, t in batch)
        locked.extend(as_ids)
        batches.append(
            Batch(
                critical_edge=(g.agents[critical[0]], g.tasks[critical[1]]),
                locked_edges=as_ids,
                bottleneck_weight_at_selection=float(level),
                zero_price=zero_price,
            )
        )

    return SeqBapResult(Matching(locked), exact, tuple(batches), iterations), net.trace
