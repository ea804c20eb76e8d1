import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from sigcover.graph import SignedGraph

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


@st.composite
def signed_graphs(draw, max_n: int = 6, max_m: int = 9, connected: bool = True, loops: bool = True):
    """Random signed multigraphs; connected ones start from a random spanning tree."""
    n = draw(st.integers(1, max_n))
    edges = []
    if connected:
        for v in range(1, n):
            edges.append((draw(st.integers(0, v - 1)), v, draw(st.sampled_from((1, -1)))))
    extra = draw(st.integers(0, max(0, max_m - len(edges))))
    for _ in range(extra):
        u = draw(st.integers(0, n - 1))
        v = u if loops and draw(st.integers(0, 5)) == 0 else draw(st.integers(0, n - 1))
        edges.append((u, v, draw(st.sampled_from((1, -1)))))
    return SignedGraph.from_edges(n, edges)
