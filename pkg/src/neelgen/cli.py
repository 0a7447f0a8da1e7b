"""Command-line entry point: ``neelgen run|verify|dispersion|decoherence-wave|cascade``.

Exit codes: 0 success, 2 invalid input, 3 a verify check exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .experiments import ConfigError, ExperimentConfig, compare_against_oracle, load_config, run, validate
from .lattice import nearest_neighbor_couplings

log = logging.getLogger("neelgen")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TOLERANCE = 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--threads", type=int, help="worker threads for Monte Carlo trajectories")
    p.add_argument("--out", help="output directory")


def _lattice_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--geometry", default="chain", choices=["chain", "square", "hypercubic"])
    p.add_argument("--sizes", type=int, nargs="+", default=[8], help="even linear sizes")
    p.add_argument("--J", type=float, default=1.0, help="nearest-neighbour exchange (J > 0 is AFM)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neelgen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the scenario described by a config file")
    p.add_argument("config")
    _common(p)

    p = sub.add_parser("verify", help="compare a config's scenario against its oracles")
    p.add_argument("config")
    _common(p)

    p = sub.add_parser("dispersion", help="magnon dispersion table")
    _lattice_flags(p)
    _common(p)

    p = sub.add_parser("decoherence-wave", help="decoherence-wave field G(r, t)")
    _lattice_flags(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--analytic", dest="method", action="store_const", const="analytic")
    mode.add_argument("--exact", dest="method", action="store_const", const="exact")
    p.add_argument("--t-max", type=float, default=16.0)
    p.add_argument("--dt", type=float, default=0.5)
    p.add_argument("--state", default="easy_plane", choices=["easy_plane", "easy_axis"])
    _common(p)

    p = sub.add_parser("cascade", help="Monte Carlo measurement cascade")
    _lattice_flags(p)
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--trajectories", type=int, default=100)
    p.add_argument("--schedule", default="random", help="random | roundrobin | explicit:<i,j,...>")
    p.add_argument("--state", default="easy_plane", choices=["easy_plane", "easy_axis"])
    _common(p)
    return parser


def _shortcut_config(args: argparse.Namespace, scenario: str) -> ExperimentConfig:
    cfg = ExperimentConfig(
        geometry=args.geometry,
        sizes=tuple(args.sizes),
        couplings=nearest_neighbor_couplings(len(args.sizes), args.J),
        scenario=scenario,
    )
    if scenario == "decoherence_wave":
        cfg.wave_method = args.method or "analytic"
        n = int(round(args.t_max / args.dt))
        cfg.times = tuple(i * args.dt for i in range(n + 1))
        cfg.state_kind = args.state
    if scenario == "cascade":
        cfg.steps = args.steps
        cfg.trajectories = args.trajectories
        cfg.schedule = args.schedule
        cfg.state_kind = args.state
        cfg.seed = 0
    return cfg


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> None:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    if args.out is not None:
        cfg.output = args.out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    config_path = None
    try:
        if args.command in ("run", "verify"):
            config_path = args.config
            cfg = load_config(args.config)
        else:
            cfg = _shortcut_config(args, args.command.replace("-", "_"))
        _apply_overrides(cfg, args)
        validate(cfg)
    except (ConfigError, ValueError, OSError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID

    if args.command == "verify":
        checks = compare_against_oracle(cfg)
        for c in checks:
            print(c.line())
        failed = [c for c in checks if not c.passed]
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
        return EXIT_TOLERANCE if failed else EXIT_OK

    try:
        manifest = run(cfg, config_path)
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID
    for name in manifest.outputs:
        log.info("wrote %s/%s", cfg.output, name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
