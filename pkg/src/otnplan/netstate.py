"""Provisioning state of one planning run.

Holds the lightpaths lit so far, their OTN-layer virtual links (one per
lightpath, carrying its leftover capacity) and the wavelength count in use
on every fiber. Wavelengths are counted, not colored.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

from .costmodel import wavelengths_needed
from .ksp import RoutePath
from .topology import Topology, link_key


class WavelengthExhaustedError(RuntimeError):
    def __init__(self, fiber: tuple[int, int], used: int, wanted: int, capacity: int):
        self.fiber = fiber
        super().__init__(
            f"fiber {fiber[0]}-{fiber[1]}: {used} of {capacity} wavelengths in use, {wanted} more requested"
        )


class InsufficientCapacityError(ValueError):
    pass


@dataclass
class Lightpath:
    id: int
    route: RoutePath
    line_rate: float
    wavelength_count: int
    leftover: float

    @property
    def capacity(self) -> float:
        return self.wavelength_count * self.line_rate

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.route.src, self.route.dst)


@dataclass(frozen=True)
class VirtualLink:
    """OTN-layer alias of a lightpath; leftover is read through to it."""

    lightpath: Lightpath

    @property
    def lightpath_id(self) -> int:
        return self.lightpath.id

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.lightpath.endpoints

    @property
    def leftover(self) -> float:
        return self.lightpath.leftover


@dataclass(frozen=True)
class Segment:
    """Contiguous stretch of a route, either on an existing virtual link or new.

    Once committed, a new segment keeps ``fresh=True`` and points at the
    lightpath lit for it.
    """

    nodes: tuple[int, ...]
    virtual: VirtualLink | None = None
    fresh: bool = False

    @property
    def is_new(self) -> bool:
        return self.virtual is None or self.fresh

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)


def _canonical(nodes: tuple[int, ...]) -> tuple[int, ...]:
    # lightpaths are bidirectional; index each route by one orientation
    return nodes if nodes[0] <= nodes[-1] else nodes[::-1]


@dataclass
class NetworkState:
    topology: Topology
    match_endpoints_only: bool = False
    lightpaths: list[Lightpath] = field(default_factory=list)
    occupancy: Counter = field(default_factory=Counter)
    reservations: list[tuple[int, float]] = field(default_factory=list)
    _by_route: dict[tuple[int, ...], list[VirtualLink]] = field(default_factory=dict, repr=False)
    _by_ends: dict[tuple[int, int], list[VirtualLink]] = field(default_factory=dict, repr=False)
    _virtual: list[VirtualLink] = field(default_factory=list, repr=False)

    @property
    def virtual_links(self) -> list[VirtualLink]:
        return list(self._virtual)

    def free_wavelengths(self, a: int, b: int) -> int:
        fiber = self.topology.link(a, b)
        return fiber.wavelength_capacity - self.occupancy[fiber.key]

    def can_light(self, nodes: tuple[int, ...], n: int) -> bool:
        return all(self.free_wavelengths(a, b) >= n for a, b in zip(nodes, nodes[1:]))

    def create_lightpath(self, route: RoutePath, line_rate: float, initial_demand: float) -> Lightpath:
        """Light ``ceil(initial_demand/line_rate)`` wavelengths along ``route``."""
        n = wavelengths_needed(initial_demand, line_rate)
        return self.light(route, line_rate, n, initial_demand)

    def light(self, route: RoutePath, line_rate: float, n: int, load: float) -> Lightpath:
        """Light exactly ``n`` wavelengths along ``route`` carrying ``load`` Gbps."""
        if load > n * line_rate:
            raise InsufficientCapacityError(f"{load:g} Gbps does not fit in {n} x {line_rate:g}G")
        for a, b in route.hops():
            fiber = self.topology.link(a, b)
            used = self.occupancy[fiber.key]
            if used + n > fiber.wavelength_capacity:
                raise WavelengthExhaustedError(fiber.key, used, n, fiber.wavelength_capacity)
        for a, b in route.hops():
            self.occupancy[link_key(a, b)] += n
        lp = Lightpath(len(self.lightpaths), route, line_rate, n, n * line_rate - load)
        self.lightpaths.append(lp)
        vl = VirtualLink(lp)
        self._virtual.append(vl)
        self._by_route.setdefault(_canonical(route.nodes), []).append(vl)
        ends = link_key(route.src, route.dst)
        self._by_ends.setdefault(ends, []).append(vl)
        if load > 0:
            self.reservations.append((lp.id, load))
        return lp

    def reserve_on_virtual(self, virtual_link: VirtualLink, demand: float) -> float:
        lp = virtual_link.lightpath
        if demand > lp.leftover:
            raise InsufficientCapacityError(
                f"lightpath {lp.id} has {lp.leftover:g} Gbps left, {demand:g} requested"
            )
        lp.leftover -= demand
        self.reservations.append((lp.id, demand))
        return lp.leftover

    def eligible(self, nodes: tuple[int, ...], demand: float) -> VirtualLink | None:
        """First-created virtual link able to carry ``demand`` over exactly ``nodes``."""
        if self.match_endpoints_only:
            pool = self._by_ends.get(link_key(nodes[0], nodes[-1]), ())
        else:
            pool = self._by_route.get(_canonical(nodes), ())
        for vl in pool:
            if vl.leftover >= demand:
                return vl
        return None

    def find_virtual_cover(self, route: RoutePath, demand: float) -> list[Segment]:
        """Split ``route`` into virtual-link segments and maximal new segments.

        Scans left to right, taking the longest eligible virtual segment that
        starts at the current node. Hops not covered by any virtual link are
        merged into new segments.
        """
        nodes = route.nodes
        last = len(nodes) - 1
        segments: list[Segment] = []
        pending_start: int | None = None
        i = 0
        while i < last:
            hit = None
            for j in range(last, i, -1):
                vl = self.eligible(nodes[i : j + 1], demand)
                if vl is not None:
                    hit = (j, vl)
                    break
            if hit is None:
                if pending_start is None:
                    pending_start = i
                i += 1
                continue
            if pending_start is not None:
                segments.append(Segment(nodes[pending_start : i + 1]))
                pending_start = None
            j, vl = hit
            segments.append(Segment(nodes[i : j + 1], vl))
            i = j
        if pending_start is not None:
            segments.append(Segment(nodes[pending_start:]))
        return segments

    def transponder_count(self) -> int:
        return 2 * sum(lp.wavelength_count for lp in self.lightpaths)

    def __iter__(self) -> Iterator[Lightpath]:
        return iter(self.lightpaths)

    def dump(self) -> str:
        """One ``lightpath`` line per lightpath, for diffing and golden files."""
        lines = ["# id route line_rate_gbps wavelengths leftover_gbps"]
        for lp in self.lightpaths:
            lines.append(
                f"lightpath {lp.id} {lp.route} {lp.line_rate:g} {lp.wavelength_count} {lp.leftover:.6f}"
            )
        return "\n".join(lines) + "\n"
