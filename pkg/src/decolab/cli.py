"""Command-line entry point.

Subcommands: run-quantum, run-classical, run-observer, run-timescales, sweep.
Exit codes: 0 success, 2 configuration error, 3 resource or cap error,
4 numerical abort.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .config import load_scenario, scenario_from_mapping
from .errors import (
    ConfigError,
    DepthCapExceeded,
    GridTooSmall,
    MismatchedSeries,
    NotConverged,
    NumericalAbort,
    SchemeInstability,
    UnitMismatch,
    WindowTooSparse,
)
from .runner import run_classical, run_observer, run_quantum, run_timescales

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decolab",
        description="Deterministic decoherence scenarios: configs in, CSV/JSON artifacts out.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_config=True):
        p = sub.add_parser(name, help=help_text)
        if needs_config:
            p.add_argument("--config", required=True, help="scenario YAML path")
        p.add_argument("--seed", type=int, default=None, help="override scenario seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument(
            "--threads", type=int, default=1, help="sweep worker count (results invariant)"
        )
        return p

    add("run-quantum", "evolve a quantum scenario")
    add("run-classical", "run the classical ensemble / Lyapunov scenario")
    add("run-observer", "run a measurement-chain scenario")
    add("sweep", "run the scenario's declared sweep axis")
    ts = add("run-timescales", "emit the celestial timescale table", needs_config=False)
    ts.add_argument("--config", default=None, help="YAML with a timescales: section")
    ts.add_argument("--preset", default=None, help="preset name or 'all'")
    return parser


def _load(args):
    cfg = load_scenario(args.config)
    if args.seed is not None:
        cfg = scenario_from_mapping({**cfg.as_dict(), "seed": args.seed})
    return cfg


def _timescales_spec(args) -> dict:
    spec = {}
    if args.config is not None:
        import yaml

        with open(args.config) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict) or "timescales" not in data:
            raise ConfigError("expected a top-level timescales section", field="config")
        spec = dict(data["timescales"] or {})
    if args.preset is not None:
        spec["preset"] = args.preset
    if not spec:
        spec = {"preset": "all"}
    return spec


def main(argv: Optional[list] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run-quantum":
            run_quantum(_load(args), out_dir=args.out, threads=args.threads)
        elif args.command == "sweep":
            cfg = _load(args)
            if cfg.sweep is None:
                raise ConfigError("scenario declares no sweep section", field="sweep")
            run_quantum(cfg, out_dir=args.out, threads=args.threads)
        elif args.command == "run-classical":
            run_classical(_load(args), out_dir=args.out)
        elif args.command == "run-observer":
            run_observer(_load(args), out_dir=args.out)
        elif args.command == "run-timescales":
            run_timescales(_timescales_spec(args), out_dir=args.out or "runs/timescales")
    except (
        ConfigError,
        GridTooSmall,
        UnitMismatch,
        WindowTooSparse,
        MismatchedSeries,
        FileNotFoundError,
    ) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DepthCapExceeded, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (NumericalAbort, SchemeInstability, NotConverged) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
