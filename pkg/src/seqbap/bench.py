"""Case-study instances, runtime benchmarks, simulation campaigns and oracle verification."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import bottleneck
from .baselines import brute_force_enumerate, solve_lexbap_iterative, solve_naive_greedy
from .distributed import CommGraph, build_comm_graph_radius, complete_comm_graph, run_distributed_seqbap
from .engine import SeqBapResult, enumerate_seqbap_solutions, solve_seqbap
from .errors import SeqbapError
from .graph import Matching, WeightedBipartiteGraph, WeightTuple, format_instance

ARENA = 100.0
ALGORITHMS = ("exact", "naive", "seqbap")


# instances


@dataclass(frozen=True)
class CaseStudyInstance:
    """Agents and goals drawn uniformly from the square arena, weights are distances.

    Positions come from NumPy's PCG64 generator seeded with ``seed``: first
    the ``n`` agent positions, then the ``n`` goal positions, each as
    ``(x, y)`` pairs in ``[0, 100)``. Agent ``i`` and goal ``j`` get ids
    ``i`` and ``j``.
    """

    agent_positions: np.ndarray
    goal_positions: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return len(self.agent_positions)

    @property
    def graph(self) -> WeightedBipartiteGraph:
        diff = self.agent_positions[:, None, :] - self.goal_positions[None, :, :]
        return WeightedBipartiteGraph.from_matrix(np.hypot(diff[..., 0], diff[..., 1]))

    @property
    def positions(self) -> dict[int, np.ndarray]:
        return {i: p for i, p in enumerate(self.agent_positions)}


def generate_instance(n: int, seed: int) -> CaseStudyInstance:
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    agents = rng.uniform(0.0, ARENA, size=(n, 2))
    goals = rng.uniform(0.0, ARENA, size=(n, 2))
    return CaseStudyInstance(agents, goals, seed)


def realization_seed(base_seed: int, n: int, realization: int) -> int:
    """Independent 64-bit seed for one realization, split from ``(base_seed, n, realization)``."""
    return int(np.random.SeedSequence([base_seed, n, realization]).generate_state(1, np.uint64)[0])


def tie_heavy_instance(n: int, seed: int, levels: int = 4) -> WeightedBipartiteGraph:
    """Complete ``n x n`` graph with integer weights drawn from ``1..levels``."""
    rng = np.random.default_rng(seed)
    return WeightedBipartiteGraph.from_matrix(rng.integers(1, levels + 1, size=(n, n)).astype(float))


# runtime benchmark


@dataclass(frozen=True)
class BenchRecord:
    n: int
    algorithm: str
    realization: int
    seconds: float
    exact: Optional[bool]
    seed: int
    clock_steps: Optional[int] = None


def _solvers() -> dict[str, Callable[[WeightedBipartiteGraph], tuple[Matching, Optional[bool]]]]:
    def seqbap(g):
        result = solve_seqbap(g)
        return result.matching, result.exact

    return {
        "exact": lambda g: (solve_lexbap_iterative(g), True),
        "naive": lambda g: (solve_naive_greedy(g), None),
        "seqbap": seqbap,
    }


def _run_realization(n: int, realization: int, base_seed: int, algorithms: Sequence[str]) -> list[BenchRecord]:
    seed = realization_seed(base_seed, n, realization)
    g = generate_instance(n, seed).graph
    solvers = _solvers()
    records, tuples = [], {}
    for name in algorithms:
        start = time.perf_counter()
        try:
            matching, exact = solvers[name](g)
        except SeqbapError as exc:
            exc.args = (f"{exc} [algorithm={name}, n={n}, realization={realization}, seed={seed}]",)
            exc.seed = seed
            raise
        seconds = time.perf_counter() - start
        tuples[name] = WeightTuple.of(g, matching)
        records.append(BenchRecord(n, name, realization, seconds, exact, seed))
    if g.distinct_weights() and len(set(tuples.values())) > 1:
        exc = SeqbapError(f"solvers disagree on a distinct-weight instance [n={n}, seed={seed}]: {tuples}")
        exc.seed = seed
        raise exc
    return records


def run_benchmark(
    n_values: Iterable[int],
    realizations: int,
    algorithms: Iterable[str] = ALGORITHMS,
    seed: int = 0,
    workers: int = 1,
) -> list[BenchRecord]:
    """Time each algorithm on the same seeded instances.

    Args:
        n_values: problem sizes.
        realizations: instances per size.
        algorithms: any of ``"exact"``, ``"naive"`` and ``"seqbap"``.
        seed: base seed; realization seeds are split from it.
        workers: process pool size; 1 runs everything in this process.

    Returns:
        Records sorted by ``(n, realization, algorithm)``.

    Raises:
        SeqbapError: a solver failed or two solvers disagreed; the message
            and the ``seed`` attribute identify the instance.
    """
    algorithms = sorted(set(algorithms))
    if not algorithms:
        raise ValueError("no algorithms selected")
    unknown = set(algorithms) - set(ALGORITHMS)
    if unknown:
        raise ValueError(f"unknown algorithms: {sorted(unknown)}")
    jobs = [(n, r, seed, algorithms) for n in n_values for r in range(realizations)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_realization, *zip(*jobs))) if jobs else []
    else:
        chunks = [_run_realization(*job) for job in jobs]
    records = [rec for chunk in chunks for rec in chunk]
    return sorted(records, key=lambda r: (r.n, r.realization, r.algorithm))


@dataclass(frozen=True)
class SummaryRow:
    n: int
    algorithm: str
    realizations: int
    median_seconds: float
    mean_seconds: float


def summarize(records: Iterable[BenchRecord]) -> list[SummaryRow]:
    groups: dict[tuple[int, str], list[float]] = {}
    for r in records:
        groups.setdefault((r.n, r.algorithm), []).append(r.seconds)
    return [
        SummaryRow(n, alg, len(times), float(np.median(times)), float(np.mean(times)))
        for (n, alg), times in sorted(groups.items())
    ]


def loglog_slope(summary: Iterable[SummaryRow], algorithm: str) -> float:
    """Least-squares slope of log(median seconds) against log(n)."""
    rows = [r for r in summary if r.algorithm == algorithm]
    if len(rows) < 2:
        raise ValueError(f"need at least two sizes to fit a slope for {algorithm!r}")
    return float(np.polyfit(np.log([r.n for r in rows]), np.log([r.median_seconds for r in rows]), 1)[0])


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "algorithm", "realization", "seed", "seconds", "exact", "clock_steps"])
    for r in records:
        exact = "" if r.exact is None else str(r.exact).lower()
        steps = "" if r.clock_steps is None else r.clock_steps
        writer.writerow([r.n, r.algorithm, r.realization, r.seed, repr(r.seconds), exact, steps])
    return buf.getvalue()


def summary_to_csv(summary: Iterable[SummaryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "algorithm", "realizations", "median_seconds", "mean_seconds"])
    for r in summary:
        writer.writerow([r.n, r.algorithm, r.realizations, repr(r.median_seconds), repr(r.mean_seconds)])
    return buf.getvalue()


def write_svg_plot(summary: Sequence[SummaryRow], path) -> None:
    """Log-log line chart of median runtime against n. Needs matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for alg in sorted({r.algorithm for r in summary}):
        rows = [r for r in summary if r.algorithm == alg]
        ax.plot([r.n for r in rows], [r.median_seconds for r in rows], marker="o", label=alg)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("median seconds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# distributed simulation


@dataclass(frozen=True)
class SimulationReport:
    instance: CaseStudyInstance
    centralised: SeqBapResult
    complete: tuple
    radius: tuple
    comm: CommGraph

    @property
    def step_ratio(self) -> float:
        return self.radius[1].clock_steps / self.complete[1].clock_steps

    @property
    def matches_centralised(self) -> bool:
        return self.complete[0] == self.centralised and self.radius[0] == self.centralised


def run_simulation_campaign(n: int = 10, seed: int = 0, radius: float = 30.0) -> SimulationReport:
    """Run the distributed solver on a complete graph and on the radius topology.

    Raises:
        DisconnectedTopology: if agents within ``radius`` of each other do
            not form a connected graph.
    """
    instance = generate_instance(n, seed)
    g = instance.graph
    comm = build_comm_graph_radius(instance.positions, radius)
    return SimulationReport(
        instance=instance,
        centralised=solve_seqbap(g),
        complete=run_distributed_seqbap(g, complete_comm_graph(g.agents)),
        radius=run_distributed_seqbap(g, comm),
        comm=comm,
    )


# oracle verification


@dataclass(frozen=True)
class Violation:
    check: str
    seed: int
    detail: str
    instance: str


@dataclass
class VerifyReport:
    checked: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def _count(self, check: str) -> None:
        self.checked[check] = self.checked.get(check, 0) + 1

    def _fail(self, check: str, seed: int, detail: str, g: WeightedBipartiteGraph) -> None:
        self.violations.append(Violation(check, seed, detail, format_instance(g)))


VERIFY_ENUMERATION_MAX_N = 5


def verify(seeds: Iterable[int], n_max: int = 5) -> VerifyReport:
    """Check solver properties against exhaustive oracles on tie-heavy instances.

    For each seed a complete graph with ``2 + seed % (n_max - 1)`` agents and
    weights in ``1..4`` is drawn. Checks:

    * ``positive_price``: the augmenting-path positive-price test agrees with the
      definitional price of absence on every edge of a bottleneck assignment.
    * ``monotone_batches``: batch bottleneck weights never increase.
    * ``inclusion``: LexBAP solutions ⊆ SeqBAP solutions ⊆ BAP solutions.
    * ``uniqueness``: the exactness flag is set iff the SeqBAP solution is unique.

    The last two enumerate solutions and only run up to
    ``VERIFY_ENUMERATION_MAX_N`` agents.
    """
    if not 2 <= n_max <= 7:
        raise ValueError("n_max must be between 2 and 7")
    report = VerifyReport()
    for seed in seeds:
        n = 2 + seed % (n_max - 1)
        g = tie_heavy_instance(n, seed)

        cert = bottleneck.solve_bap(g)
        for e in sorted(cert.matching):
            fast = bottleneck.has_positive_price(g, cert.matching, e)
            slow = bottleneck.price_of_absence(g, e).positive
            if fast != slow:
                report._fail("positive_price", seed, f"edge {e}: test says {fast}, price says {slow}", g)
                break
        report._count("positive_price")

        result = solve_seqbap(g)
        levels = [b.bottleneck_weight_at_selection for b in result.selections]
        if any(b > a for a, b in zip(levels, levels[1:])):
            report._fail("monotone_batches", seed, f"batch weights {levels} increase", g)
        report._count("monotone_batches")

        if n > VERIFY_ENUMERATION_MAX_N:
            continue
        sets = brute_force_enumerate(g)
        seq = enumerate_seqbap_solutions(g)
        if not (sets.lexbap_solutions <= seq <= sets.bap_solutions):
            report._fail("inclusion", seed, "LexBAP ⊆ SeqBAP ⊆ BAP does not hold", g)
        report._count("inclusion")
        if result.exact != (len(seq) == 1) or result.matching not in seq:
            report._fail("uniqueness", seed, f"exact={result.exact} with {len(seq)} SeqBAP solutions", g)
        report._count("uniqueness")
    return report
