"""The three benchmark environments: gridworld, pendulum swing-up, mountain car.

Each environment is a pure transition function plus a caller-owned state
value; the classes below only bundle constants (grid size, action levels)
and hold no mutable state, so instances can be shared freely.

Conventions:
- Gridworld reward is paid on the arrival cell: 100 at the goal corner,
  -1 everywhere else; the episode terminates on arrival at the goal.
- Pendulum reward is evaluated at the pre-step state and the episode is
  fixed-length (no environment-terminal states).
- Mountain car reward uses the arrival position; reaching p >= 0.45 both
  pays the bonus and terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .rng import SplitMix64


class GridState(NamedTuple):
    x: int
    y: int


class PendulumState(NamedTuple):
    theta: float  # radians, wrapped to [-pi, pi)
    omega: float  # rad/s, clamped to [-8, 8]


class MountainCarState(NamedTuple):
    p: float  # position in [-1.2, 0.6]
    v: float  # velocity in [-0.07, 0.07]


class StepResult(NamedTuple):
    next_state: object
    reward: float
    terminal: bool


# (ax, ay) moves; order is fixed so action indices are stable across runs
GRID_ACTIONS: tuple[tuple[int, int], ...] = ((-1, 0), (0, 1), (1, 0), (0, -1))

GRID_GOAL_REWARD = 100.0
GRID_STEP_REWARD = -1.0

PENDULUM_GRAVITY = 10.0
PENDULUM_MASS = 1.0
PENDULUM_LENGTH = 1.0
PENDULUM_MAX_SPEED = 8.0
PENDULUM_MAX_TORQUE = 2.0
PENDULUM_DT = 0.05

MC_MIN_POSITION = -1.2
MC_MAX_POSITION = 0.6
MC_MAX_SPEED = 0.07
MC_GOAL_POSITION = 0.45


@dataclass(frozen=True)
class ActionGrid:
    """Uniformly spaced discretization of a real action interval."""

    lo: float
    hi: float
    count: int = 64

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"ActionGrid needs at least 2 levels, got {self.count}")

    def level(self, i: int) -> float:
        """The i-th action value; level(0) == lo and level(count-1) == hi exactly."""
        if not 0 <= i < self.count:
            raise IndexError(f"action index {i} outside [0, {self.count})")
        return self.lo + (self.hi - self.lo) * (i / (self.count - 1))

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    def levels(self) -> np.ndarray:
        return np.array([self.level(i) for i in range(self.count)])


def grid_step(s: GridState, a: tuple[int, int], size: int = 64) -> StepResult:
    """One gridworld move with clamping to the board; reward on the arrival cell."""
    hi = size - 1
    nx = min(max(s.x + a[0], 0), hi)
    ny = min(max(s.y + a[1], 0), hi)
    at_goal = nx == hi and ny == hi
    reward = GRID_GOAL_REWARD if at_goal else GRID_STEP_REWARD
    return StepResult(GridState(nx, ny), reward, at_goal)


def pendulum_step(s: PendulumState, u: float, standard_integrator: bool = False) -> StepResult:
    """One pendulum step under torque u in [-2, 2].

    The printed update multiplies the whole bracket (including omega) by the
    0.05 time step; `standard_integrator=True` selects the conventional
    omega + dt * (torque and gravity terms) form instead, for comparison.
    Reward is evaluated at the pre-step state.
    """
    if not -PENDULUM_MAX_TORQUE <= u <= PENDULUM_MAX_TORQUE:
        raise ValueError(f"torque {u} outside [-2, 2]")
    g, m, l = PENDULUM_GRAVITY, PENDULUM_MASS, PENDULUM_LENGTH
    drive = -(3.0 * g / (2.0 * l)) * math.sin(s.theta) + 3.0 * u / (m * l * l)
    if standard_integrator:
        omega_raw = s.omega + drive * PENDULUM_DT
    else:
        omega_raw = (s.omega + drive) * PENDULUM_DT
    omega = min(max(omega_raw, -PENDULUM_MAX_SPEED), PENDULUM_MAX_SPEED)
    theta = (s.theta + PENDULUM_DT * omega + math.pi) % (2.0 * math.pi) - math.pi
    reward = -s.theta**2 - s.omega**2 - 0.001 * u * u
    return StepResult(PendulumState(theta, omega), reward, False)


def mountaincar_step(s: MountainCarState, u: float) -> StepResult:
    """One mountain-car step under action u in [-1, 1]; reward uses the arrival position."""
    if not -1.0 <= u <= 1.0:
        raise ValueError(f"action {u} outside [-1, 1]")
    v_raw = s.v + 0.0015 * u - math.cos(3.0 * s.p) / 400.0
    v = min(max(v_raw, -MC_MAX_SPEED), MC_MAX_SPEED)
    p = min(max(s.p + v, MC_MIN_POSITION), MC_MAX_POSITION)
    if p >= MC_GOAL_POSITION:
        return StepResult(MountainCarState(p, v), 100.0 - 0.1 * u * u, True)
    return StepResult(MountainCarState(p, v), 20.0 * p - 0.1 * u * u, False)


class Gridworld:
    """size x size board; start (0,0), goal at the far corner, 4 moves."""

    def __init__(self, size: int = 64):
        if size < 2:
            raise ValueError(f"grid size must be >= 2, got {size}")
        self.size = size
        self.state_count = size * size
        self.action_count = len(GRID_ACTIONS)
        self.feature_dim = 2
        self.max_steps = 20_000  # safety cap; episodes normally end at the goal
        self._transitions: list[list[tuple[int, float, bool]]] | None = None

    def reset(self, rng: SplitMix64 | None = None) -> GridState:
        return GridState(0, 0)

    def step(self, s: GridState, a_index: int) -> StepResult:
        return grid_step(s, GRID_ACTIONS[a_index], self.size)

    def step_index(self, s_idx: int, a_idx: int) -> tuple[int, float, bool]:
        """Index-level fast path used by the tabular training loop."""
        hi = self.size - 1
        x, y = divmod(s_idx, self.size)
        ax, ay = GRID_ACTIONS[a_idx]
        nx = min(max(x + ax, 0), hi)
        ny = min(max(y + ay, 0), hi)
        if nx == hi and ny == hi:
            return nx * self.size + ny, GRID_GOAL_REWARD, True
        return nx * self.size + ny, GRID_STEP_REWARD, False

    def transitions(self) -> list[list[tuple[int, float, bool]]]:
        """Full (state, action) -> step_index outcome table, built once.

        The dynamics are deterministic, so training loops can read this
        instead of recomputing step_index on every step.
        """
        if self._transitions is None:
            self._transitions = [
                [self.step_index(s, a) for a in range(self.action_count)]
                for s in range(self.state_count)
            ]
        return self._transitions

    def state_index(self, s: GridState) -> int:
        return s.x * self.size + s.y

    def state_at(self, idx: int) -> GridState:
        x, y = divmod(idx, self.size)
        return GridState(x, y)

    def encode(self, s: GridState) -> np.ndarray:
        hi = self.size - 1
        return np.array([s.x / hi, s.y / hi])

    @property
    def action_values(self) -> np.ndarray:
        """Action move vectors, the metric space for action similarity."""
        return np.array(GRID_ACTIONS, dtype=float)


class Pendulum:
    """Swing-up task with the torque interval [-2, 2] discretized uniformly."""

    def __init__(self, levels: int = 64, standard_integrator: bool = False):
        self.torque_grid = ActionGrid(-PENDULUM_MAX_TORQUE, PENDULUM_MAX_TORQUE, levels)
        self.action_count = levels
        self.feature_dim = 3
        self.max_steps = 200  # fixed episode length, no terminal states
        self.standard_integrator = standard_integrator

    def reset(self, rng: SplitMix64) -> PendulumState:
        theta = rng.uniform(-math.pi, math.pi)
        omega = rng.uniform(-1.0, 1.0)
        return PendulumState(theta, omega)

    def step(self, s: PendulumState, a_index: int) -> StepResult:
        u = self.torque_grid.level(a_index)
        return pendulum_step(s, u, self.standard_integrator)

    def encode(self, s: PendulumState) -> np.ndarray:
        return np.array([math.cos(s.theta), math.sin(s.theta), s.omega / PENDULUM_MAX_SPEED])

    @property
    def action_values(self) -> np.ndarray:
        return self.torque_grid.levels().reshape(-1, 1)


class MountainCar:
    """Drive out of the valley; actions in [-1, 1] discretized uniformly."""

    def __init__(self, levels: int = 64):
        self.action_grid = ActionGrid(-1.0, 1.0, levels)
        self.action_count = levels
        self.feature_dim = 2
        self.max_steps = 200  # cap; reaching the goal ends the episode early

    def reset(self, rng: SplitMix64) -> MountainCarState:
        return MountainCarState(rng.uniform(-0.6, -0.4), 0.0)

    def step(self, s: MountainCarState, a_index: int) -> StepResult:
        return mountaincar_step(s, self.action_grid.level(a_index))

    def encode(self, s: MountainCarState) -> np.ndarray:
        return np.array([(s.p + 0.3) / 0.9, s.v / MC_MAX_SPEED])

    @property
    def action_values(self) -> np.ndarray:
        return self.action_grid.levels().reshape(-1, 1)
