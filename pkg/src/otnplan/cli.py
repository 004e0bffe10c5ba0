"""Command-line driver.

Exit codes: 0 success, 1 usage or input error, 2 at least one run blocked a
demand.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .costmodel import CostParams
from .experiment import ExperimentConfig, emit_summary, run_experiment
from .osnr import OsnrParams
from .planner import MODES
from .topology import TopologyError
from .traffic import TrafficError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _key_value(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VAL, got {text!r}")
    key, val = text.split("=", 1)
    return key.strip(), val.strip()


def _modes(text: str) -> tuple[str, ...]:
    modes = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in modes if m not in MODES]
    if bad or not modes:
        raise argparse.ArgumentTypeError(f"modes must be a comma list from {', '.join(MODES)}")
    return modes


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="otnplan", description="Plan an OTN-over-DWDM network across traffic growth phases.")
    p.add_argument("--config", type=Path, help="JSON file with defaults; flags override it")
    p.add_argument("--topology", type=Path)
    p.add_argument("--traffic", type=Path)
    p.add_argument("--phases", type=int)
    p.add_argument("--growth", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--rate", type=int, choices=(100, 200))
    p.add_argument("--modes", type=_modes, help="comma list, default: all three")
    p.add_argument("--out", type=Path, help="CSV output path (default: stdout)")
    p.add_argument("--osnr-param", type=_key_value, action="append", default=[], metavar="KEY=VAL")
    p.add_argument("--cost-param", type=_key_value, action="append", default=[], metavar="KEY=VAL")
    p.add_argument("--dump-state", type=Path, metavar="DIR", help="write per-run lightpath listings here")
    p.add_argument("--workers", type=int, help="parallel (phase, mode) runs")
    p.add_argument("--endpoint-match", action="store_true", default=None,
                   help="match virtual links by endpoints only (experimental)")
    p.add_argument("--summary", action="store_true", help="print the comparison table to stderr")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_FLAG_TO_FIELD = {
    "topology": "topology_path",
    "traffic": "traffic_path",
    "phases": "phases",
    "growth": "growth",
    "k": "k",
    "rate": "line_rate",
    "modes": "modes",
    "out": "output_path",
    "dump_state": "dump_state",
    "workers": "workers",
    "endpoint_match": "match_endpoints_only",
}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    osnr_over: dict = {}
    cost_over: dict = {}
    if args.config is not None:
        raw = json.loads(args.config.read_text(encoding="utf-8"))
        base_dir = args.config.parent
        for flag, name in _FLAG_TO_FIELD.items():
            if flag in raw:
                values[name] = raw[flag]
        for name in ("topology_path", "traffic_path", "output_path", "dump_state"):
            if name in values and values[name] is not None:
                values[name] = base_dir / values[name]
        if isinstance(values.get("modes"), str):
            values["modes"] = _modes(values["modes"])
        osnr_over.update(raw.get("osnr_params", {}))
        cost_over.update(raw.get("cost_params", {}))

    for flag, name in _FLAG_TO_FIELD.items():
        val = getattr(args, flag)
        if val is not None:
            values[name] = val
    osnr_over.update(dict(args.osnr_param))
    cost_over.update(dict(args.cost_param))

    for required in ("topology_path", "traffic_path"):
        if values.get(required) is None:
            raise ValueError(f"--{required.split('_')[0]} is required")
    values["osnr"] = OsnrParams().with_overrides(osnr_over)
    values["cost"] = CostParams().with_overrides(cost_over)
    if "modes" in values:
        values["modes"] = tuple(values["modes"])
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"otnplan: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = run_experiment(config)
    except (TopologyError, TrafficError) as exc:
        path = config.topology_path if isinstance(exc, TopologyError) else config.traffic_path
        print(f"otnplan: {path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"otnplan: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if config.output_path is None:
        sys.stdout.write(result.to_csv())
    if args.summary:
        sys.stderr.write(emit_summary(result.rows))
    return EXIT_INFEASIBLE if result.infeasible else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
