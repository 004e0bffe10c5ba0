import itertools
import random
from importlib.resources import files

import pytest

from otnplan.topology import Topology, load_topology
from otnplan.traffic import TrafficMatrix, load_traffic

DATA = files("otnplan") / "data"


@pytest.fixture(scope="session")
def nsfnet() -> Topology:
    return load_topology(str(DATA / "nsfnet.topo"))


@pytest.fixture(scope="session")
def nsfnet_traffic() -> TrafficMatrix:
    return load_traffic(str(DATA / "nsfnet.traffic"))


@pytest.fixture(scope="session")
def mesh30() -> Topology:
    return load_topology(str(DATA / "mesh30.topo"))


@pytest.fixture
def chain3() -> Topology:
    return Topology.from_edges([(1, 2, 100), (2, 3, 100)])


def all_simple_paths(topology: Topology, src: int, dst: int):
    """Exhaustive DFS enumeration; independent of the Yen implementation."""
    out = []

    def walk(path, seen):
        node = path[-1]
        if node == dst:
            out.append(tuple(path))
            return
        for nxt in topology.neighbors(node):
            if nxt not in seen:
                seen.add(nxt)
                path.append(nxt)
                walk(path, seen)
                path.pop()
                seen.remove(nxt)

    walk([src], {src})
    return out


def brute_force_k_shortest(topology: Topology, src: int, dst: int, k: int):
    def length(p):
        total = 0.0
        for a, b in zip(p, p[1:]):
            total += topology.link(a, b).length
        return total

    paths = sorted(all_simple_paths(topology, src, dst), key=lambda p: (length(p), p))
    return [(length(p), p) for p in paths[:k]]


def random_connected_graph(rng: random.Random, max_nodes: int = 8, max_edges: int = 14, max_len: int = 5):
    """Random spanning tree plus extra edges, integer lengths (exact sums)."""
    n = rng.randint(2, max_nodes)
    nodes = list(range(n))
    rng.shuffle(nodes)
    edges = {}
    for i in range(1, n):
        a, b = nodes[i], nodes[rng.randrange(i)]
        edges[(min(a, b), max(a, b))] = rng.randint(1, max_len)
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in edges]
    rng.shuffle(pairs)
    budget = min(max_edges, n * (n - 1) // 2) - len(edges)
    for p in pairs[: rng.randint(0, max(budget, 0))]:
        edges[p] = rng.randint(1, max_len)
    return Topology.from_edges([(a, b, w) for (a, b), w in edges.items()])


def random_matrix(topology: Topology, seed: int, lo: float = 5, hi: float = 60) -> TrafficMatrix:
    rng = random.Random(seed)
    nodes = sorted(topology.nodes)
    triples = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            if rng.random() < 0.8:
                triples.append((a, b, round(rng.uniform(lo, hi), 2)))
    return TrafficMatrix.from_triples(triples)


_ACCEPTANCE_LINES: list[str] = []


class _Criterion:
    def __init__(self, label: str):
        self.label = label
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = f" ({'; '.join(self.details)})" if self.details else ""
        line = f"[{status}] {self.label}{detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
