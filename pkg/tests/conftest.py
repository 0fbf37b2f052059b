import itertools

import pytest
from hypothesis import HealthCheck, settings

from twcount.instance import Graph, TreeDecomposition, make_nice, single_bag_decomposition, validate_td

settings.register_profile("ci", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record one acceptance line; it is printed live and again in the terminal summary."""

    def emit(criterion: str, passed: bool, detail: str = ""):
        line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)

    return emit


# -- small graphs -------------------------------------------------------------


def complete(n):
    return Graph(n, tuple(itertools.combinations(range(1, n + 1), 2)))


def cycle(n):
    return Graph(n, tuple((i, i % n + 1) for i in range(1, n + 1)))


def path(n):
    return Graph(n, tuple((i, i + 1) for i in range(1, n)))


def k33():
    return Graph(6, tuple((a, b) for a in (1, 2, 3) for b in (4, 5, 6)))


def petersen():
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return Graph(10, tuple(outer + spokes + inner))


def elimination_td(g: Graph) -> TreeDecomposition:
    """Min-degree elimination ordering turned into a tree decomposition."""
    adj = g.adjacency()
    order, bags = [], []
    alive = set(g.vertices)
    while alive:
        v = min(alive, key=lambda u: (len(adj[u] & alive), u))
        nb = adj[v] & alive
        bags.append(frozenset(nb | {v}))
        order.append(v)
        for a, b in itertools.combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        alive.remove(v)
    pos = {v: i for i, v in enumerate(order)}
    edges = []
    for i, v in enumerate(order[:-1]):
        rest = bags[i] - {v}
        parent = min(rest, key=pos.__getitem__) if rest else order[i + 1]
        edges.append((i, pos[parent]))
    td = TreeDecomposition(tuple(bags), tuple(edges))
    assert validate_td(td, g).ok
    return td


def nice(g: Graph, td=None):
    return make_nice(td if td is not None else single_bag_decomposition(g), g)
