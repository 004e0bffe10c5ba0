"""Phase sweep across switching modes, CSV output and a text summary."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .costmodel import CostParams
from .ksp import DEFAULT_K
from .netstate import NetworkState
from .osnr import OsnrParams
from .planner import MODES, RouteTable, plan_multilayer, plan_opaque, plan_transparent
from .topology import Topology, load_topology
from .traffic import DEFAULT_GROWTH, TrafficMatrix, load_traffic, order_demands, scale_phase

CSV_HEADER = (
    "phase",
    "mode",
    "line_rate_gbps",
    "net_traffic_gbps",
    "transponders",
    "lightpaths",
    "total_cost",
    "blocked_demands",
)

TIE_TOLERANCE = 1e-9


@dataclass
class ExperimentConfig:
    topology_path: Path
    traffic_path: Path
    phases: int = 1
    growth: float = DEFAULT_GROWTH
    k: int = DEFAULT_K
    line_rate: int = 100
    modes: tuple[str, ...] = MODES
    osnr: OsnrParams = field(default_factory=OsnrParams)
    cost: CostParams = field(default_factory=CostParams)
    output_path: Path | None = None
    dump_state: Path | None = None
    workers: int = 1
    match_endpoints_only: bool = False

    def __post_init__(self):
        self.topology_path = Path(self.topology_path)
        self.traffic_path = Path(self.traffic_path)
        if self.phases < 1:
            raise ValueError("phases must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.line_rate not in (100, 200):
            raise ValueError(f"line rate must be 100 or 200 Gbps, got {self.line_rate}")
        if not self.modes:
            raise ValueError("at least one mode is required")
        unknown = set(self.modes) - set(MODES)
        if unknown:
            raise ValueError(f"unknown mode(s): {', '.join(sorted(unknown))}")
        self.modes = tuple(sorted(set(self.modes)))


@dataclass(frozen=True)
class ResultRow:
    phase: int
    mode: str
    line_rate_gbps: int
    net_traffic_gbps: float
    transponders: int
    lightpaths: int
    total_cost: float
    blocked_demands: int

    @property
    def feasible(self) -> bool:
        return self.blocked_demands == 0

    def csv_fields(self) -> list[str]:
        return [
            str(self.phase),
            self.mode,
            str(self.line_rate_gbps),
            f"{self.net_traffic_gbps:.6f}",
            str(self.transponders),
            str(self.lightpaths),
            f"{self.total_cost:.6f}",
            str(self.blocked_demands),
        ]


@dataclass
class ExperimentResult:
    rows: list[ResultRow]
    state_dumps: dict[tuple[int, str], str] = field(default_factory=dict)

    @property
    def infeasible(self) -> bool:
        return any(not r.feasible for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_fields())
        return buf.getvalue()


def _plan_one(
    topology: Topology,
    base: TrafficMatrix,
    config: ExperimentConfig,
    phase: int,
    mode: str,
    routes: RouteTable,
) -> tuple[ResultRow, str]:
    matrix = scale_phase(base, phase, config.growth)
    demands = order_demands(matrix, topology)
    if mode == "multilayer":
        state = NetworkState(topology, match_endpoints_only=config.match_endpoints_only)
        result = plan_multilayer(
            topology, demands, config.k, config.line_rate, config.osnr, config.cost,
            phase=phase, state=state, routes=routes,
        )
    elif mode == "opaque":
        result = plan_opaque(
            topology, demands, config.line_rate, config.cost, config.osnr, phase=phase, routes=routes
        )
    else:
        result = plan_transparent(
            topology, demands, config.line_rate, config.osnr, config.cost, config.k,
            phase=phase, routes=routes,
        )
    row = ResultRow(
        phase=phase,
        mode=mode,
        line_rate_gbps=config.line_rate,
        net_traffic_gbps=math.fsum(d.volume for d in matrix),
        transponders=result.transponder_count,
        lightpaths=result.lightpath_count,
        total_cost=result.total_cost,
        blocked_demands=len(result.blocked),
    )
    return row, result.state.dump() if result.state is not None else ""


_worker_ctx: dict = {}


def _worker_init(config: ExperimentConfig) -> None:
    topology = load_topology(config.topology_path)
    _worker_ctx["topology"] = topology
    _worker_ctx["base"] = load_traffic(config.traffic_path)
    _worker_ctx["routes"] = RouteTable(topology, config.k, config.osnr)
    _worker_ctx["config"] = config


def _worker_run(job: tuple[int, str]) -> tuple[ResultRow, str]:
    ctx = _worker_ctx
    return _plan_one(ctx["topology"], ctx["base"], ctx["config"], job[0], job[1], ctx["routes"])


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Plan every (phase, mode) pair and collect one row each.

    Rows come back phase-major with modes in alphabetical order no matter
    how many workers ran them. Blocked demands are counted in their row
    rather than aborting the sweep.
    """
    topology = load_topology(config.topology_path)
    base = load_traffic(config.traffic_path)
    order_demands(base, topology)  # endpoint check before any work is spawned

    jobs = [(phase, mode) for phase in range(1, config.phases + 1) for mode in config.modes]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(
            max_workers=config.workers, initializer=_worker_init, initargs=(config,)
        ) as pool:
            outputs = list(pool.map(_worker_run, jobs))
    else:
        routes = RouteTable(topology, config.k, config.osnr)
        outputs = [_plan_one(topology, base, config, p, m, routes) for p, m in jobs]

    rows = [row for row, _ in outputs]
    dumps = {job: dump for job, (_, dump) in zip(jobs, outputs)}
    result = ExperimentResult(rows, dumps)

    if config.output_path is not None:
        Path(config.output_path).write_text(result.to_csv(), encoding="utf-8")
    if config.dump_state is not None:
        write_state_dumps(result, Path(config.dump_state))
    return result


def write_state_dumps(result: ExperimentResult, directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for (phase, mode), text in sorted(result.state_dumps.items()):
        path = directory / f"state_phase{phase:02d}_{mode}.txt"
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def cheapest_modes(rows: Sequence[ResultRow]) -> list[str]:
    """Modes sharing the minimum total cost among feasible rows."""
    feasible = [r for r in rows if r.feasible]
    if not feasible:
        return []
    best = min(r.total_cost for r in feasible)
    return sorted(
        r.mode for r in feasible if math.isclose(r.total_cost, best, rel_tol=TIE_TOLERANCE, abs_tol=TIE_TOLERANCE)
    )


def emit_summary(rows: Sequence[ResultRow]) -> str:
    """Per-phase cost table with the cheapest mode flagged, plus crossover notes."""
    if not rows:
        raise ValueError("no result rows to summarize")

    lines = []
    for rate in sorted({r.line_rate_gbps for r in rows}):
        rate_rows = [r for r in rows if r.line_rate_gbps == rate]
        modes = sorted({r.mode for r in rate_rows})
        lines.append(f"line rate {rate}G")
        lines.append("  ".join(["phase".rjust(5), "traffic".rjust(10)] + [m.rjust(13) for m in modes] + ["cheapest"]))

        winners: list[tuple[int, list[str]]] = []
        for phase in sorted({r.phase for r in rate_rows}):
            by_mode = {r.mode: r for r in rate_rows if r.phase == phase}
            best = cheapest_modes(list(by_mode.values()))
            cells = []
            for m in modes:
                r = by_mode.get(m)
                if r is None:
                    cells.append("-".rjust(13))
                    continue
                text = f"{r.total_cost:.2f}" if r.feasible else "infeasible"
                mark = "*" if m in best else " "
                cells.append((text + mark).rjust(13))
            traffic = next(iter(by_mode.values())).net_traffic_gbps
            if not best:
                verdict = "none feasible"
            elif len(best) > 1:
                verdict = "tie: " + ", ".join(best)
            else:
                verdict = best[0]
            lines.append("  ".join([str(phase).rjust(5), f"{traffic:.1f}".rjust(10)] + cells + [verdict]))
            winners.append((phase, best))

        for (_, prev), (phase, cur) in zip(winners, winners[1:]):
            if prev and cur and prev != cur:
                lines.append(
                    f"crossover at phase {phase}: cheapest changes from {'/'.join(prev)} to {'/'.join(cur)}"
                )
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"
