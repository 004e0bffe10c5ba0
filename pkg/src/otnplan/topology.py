"""DWDM fiber topology with a one-to-one OTN overlay.

Topology files are line oriented::

    # comment
    node 1
    node 2
    link 1 2 80.0

Every DWDM node hosts exactly one OTN node with the same id, so only the
fiber layer is stored here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

DEFAULT_WAVELENGTHS = 80


class TopologyError(ValueError):
    """Raised for malformed or inconsistent topology input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def link_key(a: int, b: int) -> tuple[int, int]:
    """Canonical (unordered) key of the fiber between ``a`` and ``b``."""
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class FiberLink:
    a: int
    b: int
    length: float
    wavelength_capacity: int = DEFAULT_WAVELENGTHS

    def __post_init__(self):
        if self.a == self.b:
            raise TopologyError(f"self-loop on node {self.a}")
        if not self.length > 0:
            raise TopologyError(f"link {self.a}-{self.b}: length must be positive")
        if self.wavelength_capacity < 1:
            raise TopologyError(f"link {self.a}-{self.b}: wavelength capacity must be >= 1")

    @property
    def key(self) -> tuple[int, int]:
        return link_key(self.a, self.b)


@dataclass(frozen=True)
class Topology:
    nodes: frozenset[int]
    links: tuple[FiberLink, ...]
    uniform_length: float | None = None
    _adj: dict[int, dict[int, FiberLink]] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        adj: dict[int, dict[int, FiberLink]] = {n: {} for n in self.nodes}
        for link in self.links:
            for end in (link.a, link.b):
                if end not in adj:
                    raise TopologyError(f"link {link.a}-{link.b} references unknown node {end}")
            if link.b in adj[link.a]:
                raise TopologyError(f"duplicate link {link.a}-{link.b}")
            adj[link.a][link.b] = link
            adj[link.b][link.a] = link
        object.__setattr__(self, "_adj", adj)

    def neighbors(self, node: int) -> dict[int, FiberLink]:
        """Map neighbor id -> connecting fiber."""
        try:
            return self._adj[node]
        except KeyError:
            raise KeyError(f"unknown node {node}") from None

    def link(self, a: int, b: int) -> FiberLink:
        try:
            return self._adj[a][b]
        except KeyError:
            raise KeyError(f"no fiber between {a} and {b}") from None

    def has_link(self, a: int, b: int) -> bool:
        return b in self._adj.get(a, ())

    def degree(self, node: int) -> int:
        return len(self.neighbors(node))

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        start = min(self.nodes)
        seen = {start}
        queue = deque([start])
        while queue:
            for nxt in self._adj[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return len(seen) == len(self.nodes)

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int, float]],
        nodes: Iterable[int] | None = None,
        wavelength_capacity: int = DEFAULT_WAVELENGTHS,
    ) -> "Topology":
        """Build a validated topology from ``(a, b, length)`` triples."""
        links = tuple(FiberLink(a, b, float(length), wavelength_capacity) for a, b, length in edges)
        node_set = set(nodes) if nodes is not None else set()
        if nodes is None:
            for link in links:
                node_set.update((link.a, link.b))
        topo = cls(frozenset(node_set), links, _uniform(links))
        _check_graph(topo)
        return topo


def degree(topology: Topology, node: int) -> int:
    """Number of fibers incident to ``node``."""
    return topology.degree(node)


def _uniform(links: tuple[FiberLink, ...]) -> float | None:
    lengths = {link.length for link in links}
    return lengths.pop() if len(lengths) == 1 else None


def _check_graph(topo: Topology) -> None:
    for node in sorted(topo.nodes):
        if topo.degree(node) == 0:
            raise TopologyError(f"node {node} has no fiber links")
    if not topo.is_connected():
        raise TopologyError("topology is not connected")


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise TopologyError(f"{what} must be an integer, got {token!r}", lineno) from None
    if value < 0:
        raise TopologyError(f"{what} must be non-negative, got {value}", lineno)
    return value


def load_topology(source: TextIO | str | Path) -> Topology:
    """Parse and validate a topology file.

    ``source`` may be an open text stream or a path. Validation errors carry
    the offending line number; nothing is returned unless the whole file is
    consistent and the graph is connected.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_topology(fh)

    nodes: dict[int, int] = {}
    links: list[FiberLink] = []
    link_lines: list[int] = []
    seen_pairs: dict[tuple[int, int], int] = {}

    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "node":
            if len(parts) != 2:
                raise TopologyError("expected 'node <id>'", lineno)
            node = _parse_int(parts[1], lineno, "node id")
            if node in nodes:
                raise TopologyError(f"node {node} declared twice (first on line {nodes[node]})", lineno)
            nodes[node] = lineno
        elif kind == "link":
            if len(parts) != 4:
                raise TopologyError("expected 'link <id-a> <id-b> <length-km>'", lineno)
            a = _parse_int(parts[1], lineno, "link endpoint")
            b = _parse_int(parts[2], lineno, "link endpoint")
            try:
                length = float(parts[3])
            except ValueError:
                raise TopologyError(f"link length must be a number, got {parts[3]!r}", lineno) from None
            if not length > 0 or length == float("inf"):
                raise TopologyError(f"link length must be positive and finite, got {parts[3]}", lineno)
            if a == b:
                raise TopologyError(f"self-loop on node {a}", lineno)
            key = link_key(a, b)
            if key in seen_pairs:
                raise TopologyError(
                    f"duplicate link {a}-{b} (first on line {seen_pairs[key]})", lineno
                )
            seen_pairs[key] = lineno
            links.append(FiberLink(a, b, length))
            link_lines.append(lineno)
        else:
            raise TopologyError(f"unknown declaration {kind!r}", lineno)

    for link, lineno in zip(links, link_lines):
        for end in (link.a, link.b):
            if end not in nodes:
                raise TopologyError(f"link {link.a}-{link.b} references undeclared node {end}", lineno)

    linked = {n for link in links for n in (link.a, link.b)}
    for node, lineno in sorted(nodes.items(), key=lambda kv: kv[1]):
        if node not in linked:
            raise TopologyError(f"node {node} has no fiber links", lineno)

    ordered = tuple(links)
    topo = Topology(frozenset(nodes), ordered, _uniform(ordered))
    if not topo.is_connected():
        raise TopologyError("topology is not connected")
    return topo
