"""Amplifier placement and OSNR computation (APOCM).

Every span (fiber between adjacent DWDM nodes) is bracketed by a booster at
the transmit node and a preamplifier at the receive node. Each amplifier is
an EDFA17 when its required gain fits in 17 dB and an EDFA24 otherwise.

Stage OSNR follows the usual link-budget rule for a 0.1 nm reference
bandwidth::

    OSNR_i = 58 + P_launch - L_i - NF_i          [dB]

and stages add up inverse-linearly in the linear domain.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Sequence

from .ksp import RoutePath
from .topology import Topology

log = logging.getLogger(__name__)

REFERENCE_CONSTANT_DB = 58.0


class InfeasibleSpanError(ValueError):
    def __init__(self, a: int, b: int, gain: float, max_gain: float):
        self.span = (a, b)
        self.gain = gain
        super().__init__(
            f"span {a}-{b} needs {gain:.2f} dB of gain, above the {max_gain:g} dB amplifier limit"
        )


@dataclass(frozen=True)
class AmplifierModel:
    kind: str
    max_gain: float
    noise_figure: float


@dataclass(frozen=True)
class OsnrParams:
    launch_power: float = 0.0  # dBm per channel
    fiber_loss_coefficient: float = 0.25  # dB/km
    node_insertion_loss: float = 2.0  # dB per OXC traversal
    reference_constant: float = REFERENCE_CONSTANT_DB
    edfa17_nf: float = 5.0
    edfa24_nf: float = 5.5
    min_osnr: float = 13.0  # receiver threshold for newly lit lightpaths

    def __post_init__(self):
        if self.fiber_loss_coefficient < 0 or self.node_insertion_loss < 0:
            raise ValueError("losses must be non-negative")
        if self.edfa17_nf <= 0 or self.edfa24_nf <= 0:
            raise ValueError("noise figures must be positive")
        if self.reference_constant != REFERENCE_CONSTANT_DB:
            raise ValueError("reference_constant is fixed at 58 dB")

    @property
    def edfa17(self) -> AmplifierModel:
        return AmplifierModel("EDFA17", 17.0, self.edfa17_nf)

    @property
    def edfa24(self) -> AmplifierModel:
        return AmplifierModel("EDFA24", 24.0, self.edfa24_nf)

    def with_overrides(self, overrides: dict[str, str | float]) -> "OsnrParams":
        known = {f.name for f in fields(self)}
        values = {}
        for key, val in overrides.items():
            if key not in known:
                raise KeyError(f"unknown OSNR parameter {key!r}")
            values[key] = float(val)
        return replace(self, **values)


@dataclass(frozen=True)
class Amplifier:
    """One amplification stage: where it sits, what it compensates, which model."""

    node: int
    span: tuple[int, int]
    role: str  # "booster" or "preamp"
    gain: float
    model: AmplifierModel


@dataclass(frozen=True)
class RankedPath:
    route: RoutePath
    osnr: float
    amplifiers: tuple[Amplifier, ...] = field(repr=False)

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.route.nodes


def select_amplifier(gain: float, params: OsnrParams) -> AmplifierModel:
    if gain <= params.edfa17.max_gain:
        return params.edfa17
    return params.edfa24


def place_amplifiers(route: RoutePath, topology: Topology, params: OsnrParams) -> list[Amplifier]:
    """Booster + preamplifier per span, in route order.

    Raises InfeasibleSpanError if a span needs more gain than an EDFA24
    provides.
    """
    amps = []
    for a, b in route.hops():
        span_loss = topology.link(a, b).length * params.fiber_loss_coefficient
        boost_gain = params.node_insertion_loss
        pre_gain = span_loss + params.node_insertion_loss
        for gain, node, role in ((boost_gain, a, "booster"), (pre_gain, b, "preamp")):
            if gain > params.edfa24.max_gain:
                raise InfeasibleSpanError(a, b, gain, params.edfa24.max_gain)
            amps.append(Amplifier(node, (a, b), role, gain, select_amplifier(gain, params)))
    return amps


def stage_osnr(loss: float, noise_figure: float, params: OsnrParams) -> float:
    return params.reference_constant + params.launch_power - loss - noise_figure


def combine_osnr(stages_db: Iterable[float]) -> float:
    """Inverse-linear accumulation of per-stage OSNR values (dB)."""
    total = math.fsum(10.0 ** (-s / 10.0) for s in stages_db)
    if total == 0.0:
        raise ValueError("no amplification stages")
    return -10.0 * math.log10(total)


def amplifiers_osnr(amps: Sequence[Amplifier], params: OsnrParams) -> float:
    return combine_osnr(stage_osnr(amp.gain, amp.model.noise_figure, params) for amp in amps)


def path_osnr(route: RoutePath, topology: Topology, params: OsnrParams) -> float:
    """End-to-end OSNR in dB of a lightpath along ``route``."""
    return amplifiers_osnr(place_amplifiers(route, topology, params), params)


def rank_paths(
    paths: Iterable[RoutePath], topology: Topology, params: OsnrParams
) -> list[RankedPath]:
    """Paths by decreasing OSNR; ties go to fewer hops, then node order.

    Paths with an infeasible span are dropped and logged.
    """
    ranked = []
    for route in paths:
        try:
            amps = place_amplifiers(route, topology, params)
        except InfeasibleSpanError as exc:
            log.warning("dropping route %s: %s", route, exc)
            continue
        ranked.append(RankedPath(route, amplifiers_osnr(amps, params), tuple(amps)))
    ranked.sort(key=lambda r: (-r.osnr, r.route.hop_count, r.route.nodes))
    return ranked
