"""Experiment runner: seeded configs, sweeps, CSV learning curves, and a
value-iteration oracle for checking learned gridworld policies.

A config plus its seed list fully determines every output value; wall-clock
columns can be zeroed (deterministic_timing) so whole files are byte-stable.
Within a sweep, every beta value consumes the same seed list, so curves for
different smooth rates differ only through the smoothing updates.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import dqn, tabular
from .envs import Gridworld, MountainCar, Pendulum
from .rng import SplitMix64

ENVIRONMENTS = ("gridworld", "pendulum", "mountaincar")
TABULAR_ALGORITHMS = ("classic", "state-smooth", "action-smooth")
DQN_ALGORITHMS = ("dqn", "smooth-dqn")
ALGORITHMS = TABULAR_ALGORITHMS + DQN_ALGORITHMS

CSV_HEADER = "episode,steps,return,wall_ms,seed"


class ConfigError(ValueError):
    """Invalid or incompatible experiment settings."""


@dataclass
class ExperimentConfig:
    env: str
    algo: str
    episodes: int = 200
    seeds: tuple[int, ...] = (0,)
    grid_size: int = 64
    action_levels: int = 64
    # shared hyperparameters; None picks the algorithm family's default
    alpha: float | None = None
    gamma: float | None = None
    epsilon: float = 0.1
    delta_s: float = 1.0
    delta_a: float | None = None
    beta_s: float = 0.5
    beta_a: float = 0.5
    beta: float = 0.5
    # deep-learner settings
    sync_every: int = 500
    capacity: int = 50_000
    batch_size: int = 64
    warmup: int = 1_000
    hidden: tuple[int, ...] = (64, 64)
    # output and execution
    out: str | None = None
    split_output: bool = False
    deterministic_timing: bool = False
    workers: int = 1


@dataclass
class EpisodeRecord:
    episode: int
    steps: int
    ret: float  # undiscounted sum of rewards
    wall_ms: float
    seed: int


def validate_config(cfg: ExperimentConfig) -> None:
    if cfg.env not in ENVIRONMENTS:
        raise ConfigError(f"unknown environment {cfg.env!r} (choose from {', '.join(ENVIRONMENTS)})")
    if cfg.algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {cfg.algo!r} (choose from {', '.join(ALGORITHMS)})")
    if cfg.algo in TABULAR_ALGORITHMS and cfg.env != "gridworld":
        raise ConfigError(
            f"algorithm {cfg.algo!r} needs a discrete state space; "
            f"environment {cfg.env!r} is continuous (use dqn or smooth-dqn)")
    if cfg.episodes < 1:
        raise ConfigError(f"episodes must be >= 1, got {cfg.episodes}")
    if not cfg.seeds:
        raise ConfigError("at least one seed is required")
    if not 2 <= cfg.grid_size <= 64:
        raise ConfigError(f"grid size must be in [2, 64], got {cfg.grid_size}")
    if cfg.action_levels < 2:
        raise ConfigError(f"action levels must be >= 2, got {cfg.action_levels}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")
    try:
        if cfg.algo in TABULAR_ALGORITHMS:
            tabular_params(cfg)
        else:
            dqn_params(cfg)
    except ValueError as exc:
        raise ConfigError(f"invalid hyperparameter: {exc}") from exc


def tabular_params(cfg: ExperimentConfig) -> tabular.TabularHyperParams:
    return tabular.TabularHyperParams(
        alpha=0.1 if cfg.alpha is None else cfg.alpha,
        gamma=0.9 if cfg.gamma is None else cfg.gamma,
        epsilon=cfg.epsilon,
        delta_s=cfg.delta_s,
        delta_a=1.5 if cfg.delta_a is None else cfg.delta_a,
        beta_s=cfg.beta_s if cfg.algo == "state-smooth" else 0.0,
        beta_a=cfg.beta_a if cfg.algo == "action-smooth" else 0.0,
    )


def dqn_params(cfg: ExperimentConfig) -> dqn.DqnHyperParams:
    return dqn.DqnHyperParams(
        alpha=1e-4 if cfg.alpha is None else cfg.alpha,
        gamma=0.99 if cfg.gamma is None else cfg.gamma,
        epsilon=cfg.epsilon,
        beta=cfg.beta if cfg.algo == "smooth-dqn" else 0.0,
        delta_a=cfg.delta_a,
        sync_every=cfg.sync_every,
        capacity=cfg.capacity,
        batch_size=cfg.batch_size,
        warmup=cfg.warmup,
    )


def make_env(cfg: ExperimentConfig):
    if cfg.env == "gridworld":
        return Gridworld(cfg.grid_size)
    if cfg.env == "pendulum":
        return Pendulum(cfg.action_levels)
    return MountainCar(cfg.action_levels)


def _smooth_mode(algo: str) -> str:
    return {"classic": "none", "state-smooth": "state", "action-smooth": "action"}[algo]


def _run_seed(cfg: ExperimentConfig, seed: int) -> list[EpisodeRecord]:
    """Train one fresh learner for cfg.episodes episodes under one seed."""
    rng = SplitMix64(seed)
    env = make_env(cfg)
    records = []
    if cfg.algo in TABULAR_ALGORITHMS:
        params = tabular_params(cfg)
        q = tabular.QTable.zeros(env.state_count, env.action_count)
        mode = _smooth_mode(cfg.algo)
        for episode in range(cfg.episodes):
            t0 = time.perf_counter()
            steps, ret = tabular.train_episode(env, q, params, rng, smooth=mode)
            wall = 0.0 if cfg.deterministic_timing else (time.perf_counter() - t0) * 1e3
            records.append(EpisodeRecord(episode, steps, ret, wall, seed))
    else:
        params = dqn_params(cfg)
        agent = dqn.DqnAgent(env.feature_dim, env.action_values, params, rng, cfg.hidden)
        for episode in range(cfg.episodes):
            t0 = time.perf_counter()
            steps, ret = dqn.train_episode(agent, env, rng)
            wall = 0.0 if cfg.deterministic_timing else (time.perf_counter() - t0) * 1e3
            records.append(EpisodeRecord(episode, steps, ret, wall, seed))
    return records


def run_experiment(cfg: ExperimentConfig) -> dict[int, list[EpisodeRecord]]:
    """One independent training run per seed; returns records keyed by seed."""
    validate_config(cfg)
    if cfg.workers > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_run_seed, cfg, seed) for seed in cfg.seeds]
            return {seed: f.result() for seed, f in zip(cfg.seeds, futures)}
    return {seed: _run_seed(cfg, seed) for seed in cfg.seeds}


def sweep(cfg: ExperimentConfig, betas: Sequence[float]) -> dict[float, dict[int, list[EpisodeRecord]]]:
    """run_experiment once per smooth rate, with the seed list shared across
    rates so runs are paired; beta = 0 is the classic baseline."""
    if not betas:
        raise ConfigError("sweep needs at least one beta value")
    field = {"state-smooth": "beta_s", "action-smooth": "beta_a", "smooth-dqn": "beta"}.get(cfg.algo)
    if field is None:
        raise ConfigError(f"algorithm {cfg.algo!r} has no smooth rate to sweep")
    results = {}
    for beta in betas:
        if beta < 0.0:
            raise ConfigError(f"smooth rate must be >= 0, got {beta}")
        results[beta] = run_experiment(replace(cfg, **{field: beta}))
    return results


def render_csv(records: Iterable[EpisodeRecord]) -> str:
    """CSV text for a record list: fixed 5-column schema, reals at 6
    significant digits, newline-terminated."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(f"{r.episode},{r.steps},{r.ret:.6g},{r.wall_ms:.6g},{r.seed}")
    return "\n".join(lines) + "\n"


def write_csv(records: Iterable[EpisodeRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_csv(records))


def read_csv(path: str) -> list[EpisodeRecord]:
    records = []
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {header!r}")
        for line in fh:
            if not line.strip():
                continue
            episode, steps, ret, wall_ms, seed = line.strip().split(",")
            records.append(EpisodeRecord(int(episode), int(steps), float(ret),
                                         float(wall_ms), int(seed)))
    return records


def value_iteration_oracle(grid_size: int, gamma: float, tolerance: float = 1e-8) -> tabular.QTable:
    """Optimal gridworld action values via Bellman optimality backups.

    Iterates until the largest entry change drops below tolerance. The goal
    state is absorbing (its row stays zero); transitions into it use the
    arrival reward without bootstrapping.
    """
    if not 2 <= grid_size <= 64:
        raise ValueError(f"grid size must be in [2, 64], got {grid_size}")
    if tolerance <= 0.0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    env = Gridworld(grid_size)
    n, m = env.state_count, env.action_count
    next_idx = np.empty((n, m), dtype=int)
    rewards = np.empty((n, m))
    terminal = np.empty((n, m), dtype=bool)
    for s in range(n):
        for a in range(m):
            ns, r, t = env.step_index(s, a)
            next_idx[s, a], rewards[s, a], terminal[s, a] = ns, r, t
    goal = n - 1

    q = np.zeros((n, m))
    while True:
        v = q.max(axis=1)
        v[goal] = 0.0
        q_new = rewards + gamma * np.where(terminal, 0.0, v[next_idx])
        q_new[goal, :] = 0.0
        delta = np.abs(q_new - q).max()
        q = q_new
        if delta < tolerance:
            return tabular.QTable(q)


def greedy_path_length(q: tabular.QTable, size: int, cap: int = 100_000) -> int | None:
    """Steps the greedy policy takes from (0,0) to the goal; None if it
    fails to arrive within cap steps."""
    env = Gridworld(size)
    s = 0
    for step in range(1, cap + 1):
        a = tabular.greedy_action(q, s)
        s, _, terminal = env.step_index(s, a)
        if terminal:
            return step
    return None


def first_episode_with_steps_at_most(records: Sequence[EpisodeRecord], threshold: int) -> int | None:
    """Index of the first episode at or under the step threshold, if any."""
    for r in records:
        if r.steps <= threshold:
            return r.episode
    return None
