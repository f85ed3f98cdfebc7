"""Q-learning with synchronous updates of similar state-action pairs.

Tabular learners with state/action smoothing, a smooth deep Q-network, the
three benchmark environments, and a seeded experiment harness.
"""

from .envs import (ActionGrid, GridState, Gridworld, MountainCar, MountainCarState,
                   Pendulum, PendulumState, StepResult, grid_step, mountaincar_step,
                   pendulum_step)
from .harness import (EpisodeRecord, ExperimentConfig, read_csv, run_experiment, sweep,
                      value_iteration_oracle, write_csv)
from .rng import SplitMix64
from .tabular import QTable, TabularHyperParams

__all__ = [
    "ActionGrid", "EpisodeRecord", "ExperimentConfig", "GridState", "Gridworld",
    "MountainCar", "MountainCarState", "Pendulum", "PendulumState", "QTable",
    "SplitMix64", "StepResult", "TabularHyperParams", "grid_step", "mountaincar_step",
    "pendulum_step", "read_csv", "run_experiment", "sweep", "value_iteration_oracle",
    "write_csv",
]
