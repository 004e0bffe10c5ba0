"""Normalized CAPEX model.

Default prices (unitless, normalized)::

    client port   C_c    0.1 / Gbps
    OTN switching C_s    0.01 / Gbps
    OTN trunk     C_otnt 0       (backplane)
    optical client C_oc  0       (backplane)
    transponder   C_t    40
    booster       C_ba   20
    preamplifier  C_pa   20
    OXC           C_oxc  30
    wavelengths per fiber W = 80
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class CostParams:
    c_client: float = 0.1
    c_switch: float = 0.01
    c_otn_trunk: float = 0.0
    c_optical_client: float = 0.0
    c_transponder: float = 40.0
    c_booster: float = 20.0
    c_preamp: float = 20.0
    c_oxc: float = 30.0
    wavelengths_per_fiber: int = 80

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")
        if self.wavelengths_per_fiber < 1:
            raise ValueError("wavelengths_per_fiber must be >= 1")

    def with_overrides(self, overrides: dict[str, str | float]) -> "CostParams":
        known = {f.name: f for f in fields(self)}
        values = {}
        for key, val in overrides.items():
            if key not in known:
                raise KeyError(f"unknown cost parameter {key!r}")
            values[key] = int(val) if key == "wavelengths_per_fiber" else float(val)
        return replace(self, **values)


DEFAULT_COSTS = CostParams()


def _node_hardware(params: CostParams) -> float:
    # add + drop OXC ports plus the booster/preamp pair of one span
    return 2 * params.c_oxc + params.c_booster + params.c_preamp


def fiber_crossing_cost(n_nodes: int, params: CostParams = DEFAULT_COSTS) -> float:
    """Per-wavelength share of OXC and amplifier cost for a lightpath over ``n_nodes`` nodes.

    Written as the intermediate-node term plus the end-node term, which
    collapses to ``(n_nodes - 1) * (2*C_oxc + C_ba + C_pa) / W``.
    """
    if n_nodes < 2:
        raise ValueError(f"a lightpath crosses at least 2 nodes, got {n_nodes}")
    hw = _node_hardware(params)
    return ((n_nodes - 2) * hw + hw) / params.wavelengths_per_fiber


def cost_new(
    demand_gbps: float, n_wavelengths: int, n_nodes: int, params: CostParams = DEFAULT_COSTS
) -> float:
    """Cost of carrying a demand on ``n_wavelengths`` freshly lit wavelengths."""
    if not demand_gbps > 0:
        raise ValueError("demand must be positive")
    if n_wavelengths < 1:
        raise ValueError("a new lightpath needs at least one wavelength")
    client = demand_gbps * 2 * (params.c_client + params.c_switch)
    transponders = n_wavelengths * 2 * params.c_transponder
    return client + transponders + n_wavelengths * fiber_crossing_cost(n_nodes, params)


def cost_virtual(demand_gbps: float, n_nodes: int, params: CostParams = DEFAULT_COSTS) -> float:
    """Cost of grooming a demand into existing lightpaths crossing ``n_nodes`` nodes."""
    if not demand_gbps > 0:
        raise ValueError("demand must be positive")
    if n_nodes < 2:
        raise ValueError(f"a route crosses at least 2 nodes, got {n_nodes}")
    return 2 * demand_gbps * params.c_client + demand_gbps * params.c_switch * n_nodes


def wavelengths_needed(demand_gbps: float, line_rate: float) -> int:
    if not demand_gbps > 0:
        raise ValueError("demand must be positive")
    if not line_rate > 0:
        raise ValueError("line rate must be positive")
    return math.ceil(demand_gbps / line_rate)
