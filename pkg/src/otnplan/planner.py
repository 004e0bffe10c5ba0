"""Switching policies: multilayer (MSIM), opaque and transparent.

All three take demands already ordered (see ``traffic.order_demands``) and
return a :class:`PlanResult`. Only the multilayer planner depends on the
order in a meaningful way, since each committed demand changes the
leftover capacity seen by the next one.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .costmodel import (
    DEFAULT_COSTS,
    CostParams,
    cost_new,
    cost_virtual,
    fiber_crossing_cost,
    wavelengths_needed,
)
from .ksp import DEFAULT_K, RoutePath, make_route, yen_k_shortest
from .netstate import NetworkState, Segment, VirtualLink
from .osnr import InfeasibleSpanError, OsnrParams, RankedPath, path_osnr, rank_paths
from .topology import Topology, link_key
from .traffic import Demand

log = logging.getLogger(__name__)

MODES = ("multilayer", "opaque", "transparent")


class DemandBlockedError(RuntimeError):
    def __init__(self, demand: Demand, reason: str):
        self.demand = demand
        super().__init__(f"demand {demand} blocked: {reason}")


@dataclass(frozen=True)
class Realization:
    demand: Demand
    route: RoutePath
    segments: tuple[Segment, ...]
    cost: float
    new_wavelengths: int
    osnr: float


@dataclass
class PlanResult:
    mode: str
    phase: int
    line_rate: float
    transponder_count: int
    total_cost: float
    realizations: list[Realization]
    lightpath_count: int
    blocked: list[Demand] = field(default_factory=list)
    state: NetworkState | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return not self.blocked

    @property
    def realized_gbps(self) -> float:
        return math.fsum(r.demand.volume for r in self.realizations)


class RouteTable:
    """Memoized OSNR-ranked K shortest paths per node pair.

    Routes depend only on the topology, ``k`` and the OSNR parameters, so a
    single table can serve every phase and mode of an experiment.
    """

    def __init__(self, topology: Topology, k: int = DEFAULT_K, osnr_params: OsnrParams | None = None):
        self.topology = topology
        self.k = k
        self.osnr_params = osnr_params or OsnrParams()
        self._ranked: dict[tuple[int, int], list[RankedPath]] = {}
        self._seg_osnr: dict[tuple[int, ...], float | None] = {}

    def ranked(self, src: int, dst: int) -> list[RankedPath]:
        key = (src, dst)
        if key not in self._ranked:
            paths = yen_k_shortest(self.topology, src, dst, self.k)
            self._ranked[key] = rank_paths(paths, self.topology, self.osnr_params)
        return self._ranked[key]

    def shortest(self, src: int, dst: int) -> RoutePath:
        return yen_k_shortest(self.topology, src, dst, 1)[0]

    def segment_osnr(self, nodes: tuple[int, ...]) -> float | None:
        """OSNR of a lightpath over ``nodes``, or None if a span is infeasible."""
        if nodes not in self._seg_osnr:
            try:
                value = path_osnr(make_route(self.topology, nodes), self.topology, self.osnr_params)
            except InfeasibleSpanError:
                value = None
            self._seg_osnr[nodes] = value
        return self._seg_osnr[nodes]

    def lightable(self, nodes: tuple[int, ...]) -> bool:
        osnr = self.segment_osnr(nodes)
        return osnr is not None and osnr >= self.osnr_params.min_osnr


def segments_cost(
    segments: Sequence[Segment], demand: float, n_wavelengths: int, params: CostParams
) -> float:
    """Cost of carrying ``demand`` over a covered/new segmentation.

    Each new segment is priced as a fresh lightpath. Consecutive virtual
    segments form one groomed run: client ports at its two ends and OTN
    switching at every node it crosses.
    """
    total = 0.0
    run_nodes = 0
    for seg in segments:
        if seg.is_new:
            if run_nodes:
                total += cost_virtual(demand, run_nodes, params)
                run_nodes = 0
            total += cost_new(demand, n_wavelengths, seg.n_nodes, params)
        else:
            run_nodes = seg.n_nodes if not run_nodes else run_nodes + seg.n_nodes - 1
    if run_nodes:
        total += cost_virtual(demand, run_nodes, params)
    return total


@dataclass(frozen=True)
class _Candidate:
    key: tuple
    ranked: RankedPath
    segments: tuple[Segment, ...]
    cost: float
    new_wavelengths: int


def _evaluate(
    state: NetworkState,
    routes: RouteTable,
    ranked: RankedPath,
    rank: int,
    demand: Demand,
    n: int,
    cost_params: CostParams,
) -> list[_Candidate]:
    route = ranked.route
    options = [(Segment(route.nodes),)]
    cover = tuple(state.find_virtual_cover(route, demand.volume))
    if any(not s.is_new for s in cover):
        options.insert(0, cover)

    out = []
    for segments in options:
        new = [s for s in segments if s.is_new]
        if not all(routes.lightable(s.nodes) and state.can_light(s.nodes, n) for s in new):
            continue
        cost = segments_cost(segments, demand.volume, n, cost_params)
        new_wl = n * len(new)
        key = (cost, rank, new_wl, route.nodes)
        out.append(_Candidate(key, ranked, segments, cost, new_wl))
    return out


def _commit(
    state: NetworkState, segments: Iterable[Segment], demand: Demand, line_rate: float
) -> tuple[Segment, ...]:
    committed = []
    for seg in segments:
        if seg.is_new:
            sub = make_route(state.topology, seg.nodes)
            lp = state.create_lightpath(sub, line_rate, demand.volume)
            committed.append(Segment(seg.nodes, VirtualLink(lp), fresh=True))
        else:
            state.reserve_on_virtual(seg.virtual, demand.volume)
            committed.append(seg)
    return tuple(committed)


def plan_multilayer(
    topology: Topology,
    demands: Sequence[Demand],
    k: int = DEFAULT_K,
    line_rate: float = 100,
    osnr_params: OsnrParams | None = None,
    cost_params: CostParams = DEFAULT_COSTS,
    *,
    phase: int = 1,
    state: NetworkState | None = None,
    routes: RouteTable | None = None,
    strict: bool = False,
) -> PlanResult:
    """Route demands one at a time, grooming into leftover capacity when cheaper.

    For every OSNR-ranked candidate route two options are priced: the greedy
    virtual cover of the route and lighting the whole route afresh. The
    cheapest feasible option wins; ties go to the better OSNR rank, then
    fewer new wavelengths, then node order.

    ``state`` may be pre-seeded with lightpaths; it is mutated in place.
    With ``strict`` a blocked demand raises DemandBlockedError instead of
    being recorded in ``PlanResult.blocked``.
    """
    osnr_params = osnr_params or OsnrParams()
    if routes is None:
        routes = RouteTable(topology, k, osnr_params)
    if state is None:
        state = NetworkState(topology)
    baseline_lightpaths = len(state.lightpaths)

    realizations: list[Realization] = []
    blocked: list[Demand] = []
    total = 0.0
    for demand in demands:
        n = wavelengths_needed(demand.volume, line_rate)
        candidates = []
        for rank, ranked in enumerate(routes.ranked(demand.src, demand.dst)):
            candidates.extend(_evaluate(state, routes, ranked, rank, demand, n, cost_params))
        if not candidates:
            if strict:
                raise DemandBlockedError(demand, "no OSNR-feasible route with free wavelengths")
            log.warning("demand %s blocked", demand)
            blocked.append(demand)
            continue
        best = min(candidates, key=lambda c: c.key)
        segments = _commit(state, best.segments, demand, line_rate)
        total += best.cost
        realizations.append(
            Realization(demand, best.ranked.route, segments, best.cost, best.new_wavelengths, best.ranked.osnr)
        )

    new_lps = state.lightpaths[baseline_lightpaths:]
    return PlanResult(
        mode="multilayer",
        phase=phase,
        line_rate=line_rate,
        transponder_count=2 * sum(lp.wavelength_count for lp in new_lps),
        total_cost=total,
        realizations=realizations,
        lightpath_count=len(new_lps),
        blocked=blocked,
        state=state,
    )


def opaque_demand_cost(demand_gbps: float, hops: int, params: CostParams) -> float:
    """Client and OTN switching cost of one demand under O-E-O at every hop.

    Client ports and switching at both ends, plus one more switching pass at
    each intermediate node.
    """
    return demand_gbps * 2 * (params.c_client + params.c_switch) + demand_gbps * params.c_switch * (hops - 1)


def opaque_link_cost(n_wavelengths: int, params: CostParams) -> float:
    """Single-span lightpaths on one fiber: two transponders and span hardware each."""
    return n_wavelengths * (2 * params.c_transponder + fiber_crossing_cost(2, params))


def plan_opaque(
    topology: Topology,
    demands: Sequence[Demand],
    line_rate: float = 100,
    cost_params: CostParams = DEFAULT_COSTS,
    osnr_params: OsnrParams | None = None,
    *,
    phase: int = 1,
    routes: RouteTable | None = None,
    strict: bool = False,
) -> PlanResult:
    """Shortest-path routing with full grooming at every hop.

    Traffic is summed per fiber and each fiber gets ``ceil(load/line_rate)``
    single-span wavelengths.
    """
    osnr_params = osnr_params or OsnrParams()
    if routes is None:
        routes = RouteTable(topology, DEFAULT_K, osnr_params)

    loads: dict[tuple[int, int], float] = defaultdict(float)
    paths: list[tuple[Demand, RoutePath]] = []
    blocked: list[Demand] = []
    for demand in demands:
        route = routes.shortest(demand.src, demand.dst)
        if not all(routes.lightable((a, b)) for a, b in route.hops()):
            if strict:
                raise DemandBlockedError(demand, f"route {route} has an OSNR-infeasible span")
            blocked.append(demand)
            continue
        paths.append((demand, route))
        for a, b in route.hops():
            loads[link_key(a, b)] += demand.volume

    # a fiber that cannot carry its aggregate blocks every demand crossing it
    overfull = set()
    for key in sorted(loads):
        n = wavelengths_needed(loads[key], line_rate)
        if n > topology.link(*key).wavelength_capacity:
            overfull.add(key)
    if overfull:
        kept = []
        for demand, route in paths:
            if any(link_key(a, b) in overfull for a, b in route.hops()):
                if strict:
                    raise DemandBlockedError(demand, "wavelengths exhausted on an opaque link")
                blocked.append(demand)
                for a, b in route.hops():
                    loads[link_key(a, b)] -= demand.volume
            else:
                kept.append((demand, route))
        paths = kept

    state = NetworkState(topology)
    link_vl: dict[tuple[int, int], VirtualLink] = {}
    total = 0.0
    for key in sorted(loads):
        load = loads[key]
        if load <= 1e-9:
            continue
        n = wavelengths_needed(load, line_rate)
        lp = state.light(make_route(topology, key), line_rate, n, load)
        link_vl[key] = VirtualLink(lp)
        total += opaque_link_cost(n, cost_params)

    realizations = []
    for demand, route in paths:
        cost = opaque_demand_cost(demand.volume, route.hop_count, cost_params)
        total += cost
        segs = tuple(Segment((a, b), link_vl[link_key(a, b)], fresh=True) for a, b in route.hops())
        osnr = min(routes.segment_osnr((a, b)) for a, b in route.hops())
        realizations.append(Realization(demand, route, segs, cost, 0, osnr))

    return PlanResult(
        mode="opaque",
        phase=phase,
        line_rate=line_rate,
        transponder_count=state.transponder_count(),
        total_cost=total,
        realizations=realizations,
        lightpath_count=len(state.lightpaths),
        blocked=sorted(blocked, key=lambda d: (d.src, d.dst)),
        state=state,
    )


def plan_transparent(
    topology: Topology,
    demands: Sequence[Demand],
    line_rate: float = 100,
    osnr_params: OsnrParams | None = None,
    cost_params: CostParams = DEFAULT_COSTS,
    k: int = DEFAULT_K,
    *,
    phase: int = 1,
    routes: RouteTable | None = None,
    strict: bool = False,
) -> PlanResult:
    """One end-to-end lightpath set per node pair, on its best-OSNR route.

    Demands of the same pair share the pair's wavelengths; nothing is
    groomed at intermediate nodes.
    """
    osnr_params = osnr_params or OsnrParams()
    if routes is None:
        routes = RouteTable(topology, k, osnr_params)

    groups: dict[tuple[int, int], list[Demand]] = {}
    for demand in demands:
        groups.setdefault(demand.pair, []).append(demand)

    state = NetworkState(topology)
    realizations = []
    blocked = []
    total = 0.0
    for (a, b), members in groups.items():
        volume = math.fsum(d.volume for d in members)
        n = wavelengths_needed(volume, line_rate)
        chosen = None
        for ranked in routes.ranked(a, b):
            if ranked.osnr >= osnr_params.min_osnr and state.can_light(ranked.route.nodes, n):
                chosen = ranked
                break
        if chosen is None:
            if strict:
                raise DemandBlockedError(members[0], "no OSNR-feasible route with free wavelengths")
            blocked.extend(members)
            continue
        lp = state.light(chosen.route, line_rate, n, volume)
        pair_cost = cost_new(volume, n, len(chosen.route.nodes), cost_params)
        total += pair_cost
        seg = (Segment(chosen.route.nodes, VirtualLink(lp), fresh=True),)
        for i, d in enumerate(members):
            realizations.append(
                Realization(d, chosen.route, seg, pair_cost * d.volume / volume, n if i == 0 else 0, chosen.osnr)
            )

    return PlanResult(
        mode="transparent",
        phase=phase,
        line_rate=line_rate,
        transponder_count=state.transponder_count(),
        total_cost=total,
        realizations=realizations,
        lightpath_count=len(state.lightpaths),
        blocked=blocked,
        state=state,
    )
