"""Command-line benchmark runner.

Settings come from three layers: built-in defaults, an optional JSON config
file whose keys mirror the flag names, and the flags themselves (highest
precedence). Results are written as CSV learning curves, either to --out or
to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path
from typing import Sequence

from .harness import (ALGORITHMS, ConfigError, ENVIRONMENTS, ExperimentConfig,
                      render_csv, run_experiment, sweep, validate_config)


def _comma_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _comma_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothq",
        description="Train tabular or deep Q-learners, with optional smoothing of "
                    "similar states/actions, and record per-episode learning curves.")
    parser.add_argument("--config", metavar="FILE", help="JSON file whose keys mirror these flags")
    parser.add_argument("--env", choices=ENVIRONMENTS)
    parser.add_argument("--algo", choices=ALGORITHMS)
    parser.add_argument("--alpha", type=float, help="learning step size")
    parser.add_argument("--gamma", type=float, help="discount factor")
    parser.add_argument("--epsilon", type=float, help="exploration probability")
    parser.add_argument("--beta-s", type=float, dest="beta_s", help="state smooth rate")
    parser.add_argument("--beta-a", type=float, dest="beta_a", help="action smooth rate")
    parser.add_argument("--beta", type=float, help="deep smooth rate")
    parser.add_argument("--delta-s", type=float, dest="delta_s", help="state similarity radius")
    parser.add_argument("--delta-a", type=float, dest="delta_a", help="action similarity radius")
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--seeds", type=_comma_ints, help="comma-separated seed list")
    parser.add_argument("--sweep-betas", type=_comma_floats, dest="sweep_betas",
                        help="run once per smooth rate, with paired seeds")
    parser.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    parser.add_argument("--grid-size", type=int, dest="grid_size", help="gridworld side length (test scaling)")
    parser.add_argument("--action-levels", type=int, dest="action_levels",
                        help="discretization levels for continuous actions")
    parser.add_argument("--workers", type=int, help="parallel seed runs (default 1)")
    parser.add_argument("--split-output", action="store_const", const=True, dest="split_output",
                        help="one CSV file per (beta, seed) instead of one concatenated file")
    parser.add_argument("--deterministic-timing", action="store_const", const=True,
                        dest="deterministic_timing", help="zero the wall_ms column for byte-exact output")
    return parser


_CONFIG_FIELDS = {f.name for f in fields(ExperimentConfig)}
_FILE_ONLY_KEYS = {"sweep_betas"}


def parse_config(argv: Sequence[str] | None = None) -> tuple[ExperimentConfig, tuple[float, ...] | None]:
    """Resolve flags over config file over defaults into a validated config.

    Returns the config and the sweep beta list (None if not sweeping).
    """
    parser = build_parser()
    ns = parser.parse_args(argv)

    merged: dict = {}
    if ns.config:
        try:
            raw = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file {ns.config}: {exc}")
        if not isinstance(raw, dict):
            parser.error(f"config file {ns.config} must hold a JSON object")
        for key, value in raw.items():
            name = key.replace("-", "_")
            if name not in _CONFIG_FIELDS | _FILE_ONLY_KEYS:
                parser.error(f"unknown config file key {key!r}")
            if name in ("seeds", "hidden") and isinstance(value, list):
                value = tuple(value)
            if name == "sweep_betas" and isinstance(value, list):
                value = tuple(float(v) for v in value)
            merged[name] = value

    for name in _CONFIG_FIELDS | _FILE_ONLY_KEYS:
        value = getattr(ns, name, None)
        if value is not None:
            merged[name] = value

    if "env" not in merged or "algo" not in merged:
        parser.error("missing required settings: --env and --algo (flags or config file)")

    sweep_betas = merged.pop("sweep_betas", None)
    try:
        cfg = ExperimentConfig(**merged)
        validate_config(cfg)
    except (ConfigError, TypeError) as exc:
        parser.error(str(exc))
    return cfg, sweep_betas


def _split_path(out: str, seed: int, beta: float | None) -> Path:
    base = Path(out)
    tag = f"_seed{seed}" if beta is None else f"_beta{beta:g}_seed{seed}"
    return base.with_name(base.stem + tag + (base.suffix or ".csv"))


def main(argv: Sequence[str] | None = None) -> int:
    cfg, sweep_betas = parse_config(argv)

    if sweep_betas is not None:
        by_beta = sweep(cfg, sweep_betas)
        groups = [(beta, seed, records)
                  for beta in sweep_betas
                  for seed, records in by_beta[beta].items()]
    else:
        by_seed = run_experiment(cfg)
        groups = [(None, seed, records) for seed, records in by_seed.items()]

    if cfg.split_output:
        if cfg.out is None:
            print("--split-output requires --out", file=sys.stderr)
            return 2
        for beta, seed, records in groups:
            path = _split_path(cfg.out, seed, beta)
            path.write_text(render_csv(records), newline="")
        return 0

    text = render_csv(r for _, _, records in groups for r in records)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text, newline="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
