"""Traffic matrices: loading, per-phase growth and MSIM demand ordering."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .topology import Topology

DEFAULT_GROWTH = 0.15


class TrafficError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class Demand:
    """A bidirectional OTN service between two nodes, stored with src < dst."""

    src: int
    dst: int
    volume: float

    def __post_init__(self):
        if self.src == self.dst:
            raise TrafficError(f"demand {self.src}-{self.dst}: endpoints must differ")
        if not self.volume > 0:
            raise TrafficError(f"demand {self.src}-{self.dst}: volume must be positive")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.src, self.dst) if self.src < self.dst else (self.dst, self.src)

    def __str__(self) -> str:
        return f"{self.src}->{self.dst} ({self.volume:g} Gbps)"


@dataclass(frozen=True)
class TrafficMatrix:
    demands: tuple[Demand, ...]

    def __post_init__(self):
        seen = set()
        for d in self.demands:
            if d.pair in seen:
                raise TrafficError(f"more than one demand for pair {d.pair}")
            seen.add(d.pair)

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[int, int, float]]) -> "TrafficMatrix":
        demands = []
        for src, dst, vol in triples:
            if src > dst:
                src, dst = dst, src
            demands.append(Demand(src, dst, float(vol)))
        return cls(tuple(sorted(demands)))

    def __len__(self) -> int:
        return len(self.demands)

    def __iter__(self):
        return iter(self.demands)

    @property
    def total_volume(self) -> float:
        return sum(d.volume for d in self.demands)


def load_traffic(source: TextIO | str | Path) -> TrafficMatrix:
    """Parse ``demand <src> <dst> <gbps>`` lines into a symmetric matrix.

    A pair may appear once (the reverse direction is implied) or twice with
    matching volumes.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_traffic(fh)

    volumes: dict[tuple[int, int], tuple[float, int, bool]] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "demand" or len(parts) != 4:
            raise TrafficError("expected 'demand <src> <dst> <gbps>'", lineno)
        try:
            src, dst = int(parts[1]), int(parts[2])
        except ValueError:
            raise TrafficError("demand endpoints must be integers", lineno) from None
        try:
            vol = float(parts[3])
        except ValueError:
            raise TrafficError(f"volume must be a number, got {parts[3]!r}", lineno) from None
        if src < 0 or dst < 0:
            raise TrafficError("demand endpoints must be non-negative", lineno)
        if src == dst:
            raise TrafficError(f"demand from node {src} to itself", lineno)
        if not vol > 0 or vol == float("inf"):
            raise TrafficError(f"volume must be positive and finite, got {parts[3]}", lineno)

        forward = src < dst
        pair = (src, dst) if forward else (dst, src)
        if pair in volumes:
            prev_vol, prev_line, prev_forward = volumes[pair]
            if prev_forward == forward:
                raise TrafficError(f"demand {src}->{dst} declared twice (first on line {prev_line})", lineno)
            if prev_vol != vol:
                raise TrafficError(
                    f"asymmetric demand {pair[0]}-{pair[1]}: {prev_vol:g} on line {prev_line} vs {vol:g}",
                    lineno,
                )
            continue
        volumes[pair] = (vol, lineno, forward)

    return TrafficMatrix(tuple(Demand(a, b, v) for (a, b), (v, _, _) in sorted(volumes.items())))


def scale_phase(base: TrafficMatrix, phase: int, growth: float = DEFAULT_GROWTH) -> TrafficMatrix:
    """Volumes of growth phase ``phase`` (1-based): ``base * (1+growth)**(phase-1)``."""
    if phase < 1:
        raise ValueError(f"phase must be >= 1, got {phase}")
    if growth < 0:
        raise ValueError(f"growth must be >= 0, got {growth}")
    factor = (1.0 + growth) ** (phase - 1)
    return TrafficMatrix(tuple(Demand(d.src, d.dst, d.volume * factor) for d in base.demands))


def order_demands(matrix: TrafficMatrix, topology: Topology) -> list[Demand]:
    """Adjacent-node demands first, then the rest; each group by decreasing volume.

    Equal volumes fall back to ``(src, dst)`` order.
    """
    for d in matrix.demands:
        for end in (d.src, d.dst):
            if end not in topology.nodes:
                raise TrafficError(f"demand {d.src}-{d.dst} references node {end} not in topology")

    def key(d: Demand):
        return (not topology.has_link(d.src, d.dst), -d.volume, d.src, d.dst)

    return sorted(matrix.demands, key=key)
