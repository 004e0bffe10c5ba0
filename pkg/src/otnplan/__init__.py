"""Multilayer OTN-over-DWDM network planning."""

from .costmodel import CostParams, cost_new, cost_virtual, fiber_crossing_cost, wavelengths_needed
from .ksp import RoutePath, yen_k_shortest
from .netstate import NetworkState
from .osnr import OsnrParams, path_osnr, place_amplifiers, rank_paths
from .planner import PlanResult, plan_multilayer, plan_opaque, plan_transparent
from .topology import Topology, load_topology
from .traffic import Demand, TrafficMatrix, load_traffic, order_demands, scale_phase

__version__ = "0.1.0"

__all__ = [
    "CostParams",
    "Demand",
    "NetworkState",
    "OsnrParams",
    "PlanResult",
    "RoutePath",
    "Topology",
    "TrafficMatrix",
    "cost_new",
    "cost_virtual",
    "fiber_crossing_cost",
    "load_topology",
    "load_traffic",
    "order_demands",
    "path_osnr",
    "place_amplifiers",
    "plan_multilayer",
    "plan_opaque",
    "plan_transparent",
    "rank_paths",
    "scale_phase",
    "wavelengths_needed",
    "yen_k_shortest",
]
