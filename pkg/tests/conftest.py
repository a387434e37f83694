import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from seqbap.bottleneck import mcm_size
from seqbap.graph import WeightedBipartiteGraph

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def graphs(draw, max_agents=5, levels=None, min_agents=1, density=0.25, saturating=True, square=False):
    """Random bipartite graphs with at least as many agents as tasks.

    ``levels`` draws integer weights from ``1..levels`` (many ties); ``None``
    draws continuous weights (distinct with probability one). With
    ``saturating`` every task can be matched; ``square`` makes the counts
    equal so that saturating matchings are perfect.
    """
    n_agents = draw(st.integers(min_agents, max_agents))
    n_tasks = n_agents if square else draw(st.integers(1, n_agents))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    if levels is None:
        w = rng.uniform(0.0, 100.0, size=(n_agents, n_tasks))
    else:
        w = rng.integers(1, levels + 1, size=(n_agents, n_tasks)).astype(float)
    w[rng.random((n_agents, n_tasks)) < density] = np.inf
    g = WeightedBipartiteGraph.from_matrix(w)
    if saturating and mcm_size(g) < n_tasks:
        # diagonal edges guarantee a task-saturating matching
        for j in range(n_tasks):
            if not np.isfinite(w[j, j]):
                w[j, j] = rng.integers(1, (levels or 100) + 1)
        g = WeightedBipartiteGraph.from_matrix(w)
    return g
