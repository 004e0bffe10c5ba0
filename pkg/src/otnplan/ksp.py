"""Yen's K shortest loop-free paths over the fiber graph.

Paths are ordered by total length in km, then by node sequence, so the
result is fully deterministic even on uniform-length meshes where many
paths tie.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .topology import Topology

DEFAULT_K = 10


class NoPathError(ValueError):
    pass


@dataclass(frozen=True)
class RoutePath:
    nodes: tuple[int, ...]
    total_length: float

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    @property
    def src(self) -> int:
        return self.nodes[0]

    @property
    def dst(self) -> int:
        return self.nodes[-1]

    def hops(self):
        return zip(self.nodes, self.nodes[1:])

    def sort_key(self):
        return (self.total_length, self.nodes)

    def __str__(self) -> str:
        return "-".join(map(str, self.nodes))


def path_length(topology: Topology, nodes: Sequence[int]) -> float:
    """Sum of fiber lengths along ``nodes``, accumulated from the first node."""
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        total += topology.link(a, b).length
    return total


def make_route(topology: Topology, nodes: Sequence[int]) -> RoutePath:
    """Validate ``nodes`` as a loop-free walk over existing fibers."""
    nodes = tuple(nodes)
    if len(nodes) < 2:
        raise ValueError("a route needs at least two nodes")
    if len(set(nodes)) != len(nodes):
        raise ValueError(f"route {nodes} repeats a node")
    return RoutePath(nodes, path_length(topology, nodes))


def _shortest(
    topology: Topology,
    src: int,
    dst: int,
    banned_nodes: set[int],
    banned_edges: set[tuple[int, int]],
) -> tuple[float, tuple[int, ...]] | None:
    # Heap entries carry the whole path so that the first settlement of a
    # node is the lexicographically smallest among its shortest paths.
    heap = [(0.0, (src,))]
    settled: set[int] = set()
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == dst:
            return dist, path
        for nxt, link in topology.neighbors(node).items():
            if nxt in settled or nxt in banned_nodes or (node, nxt) in banned_edges:
                continue
            heapq.heappush(heap, (dist + link.length, path + (nxt,)))
    return None


def yen_k_shortest(topology: Topology, src: int, dst: int, k: int = DEFAULT_K) -> list[RoutePath]:
    """Up to ``k`` loop-free paths from ``src`` to ``dst``, shortest first."""
    for node in (src, dst):
        if node not in topology.nodes:
            raise KeyError(f"unknown node {node}")
    if src == dst:
        raise ValueError("source and destination must differ")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    first = _shortest(topology, src, dst, set(), set())
    if first is None:
        raise NoPathError(f"no path between {src} and {dst}")

    accepted = [make_route(topology, first[1])]
    candidates: list[tuple[float, tuple[int, ...]]] = []
    known = {first[1]}

    while len(accepted) < k:
        last = accepted[-1].nodes
        for i in range(len(last) - 1):
            spur = last[i]
            root = last[: i + 1]
            banned_edges = set()
            for p in accepted:
                if p.nodes[: i + 1] == root:
                    a, b = p.nodes[i], p.nodes[i + 1]
                    banned_edges.add((a, b))
                    banned_edges.add((b, a))
            banned_nodes = set(root[:-1])
            found = _shortest(topology, spur, dst, banned_nodes, banned_edges)
            if found is None:
                continue
            nodes = root[:-1] + found[1]
            if nodes in known:
                continue
            known.add(nodes)
            heapq.heappush(candidates, (path_length(topology, nodes), nodes))
        if not candidates:
            break
        length, nodes = heapq.heappop(candidates)
        accepted.append(RoutePath(nodes, length))

    return accepted
