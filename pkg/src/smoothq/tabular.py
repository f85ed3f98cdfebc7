"""Tabular Q-learning and its smoothing variants.

Alongside the classic one-entry update, a state-smoothing variant pulls
Q(s', a) toward the current TD target for every state s' within Euclidean
distance delta_s of s, and an action-smoothing variant does the same for
Q(s, a') over actions a' within delta_a of a (measured over action values,
not indices). The updated pair itself is excluded from the neighbor pass,
so smooth rate 0 reproduces classic Q-learning exactly, step for step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .rng import SplitMix64


@dataclass
class TabularHyperParams:
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.1
    delta_s: float = 1.0
    delta_a: float = 1.5
    beta_s: float = 0.0
    beta_a: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.delta_s < 0.0 or self.delta_a < 0.0:
            raise ValueError("similarity radii must be >= 0")
        if not 0.0 <= self.beta_s <= 1.0 or not 0.0 <= self.beta_a <= 1.0:
            raise ValueError("smooth rates must be in [0, 1]")


@dataclass
class QTable:
    """Dense action-value table; rows are states, columns are actions."""

    values: np.ndarray

    @classmethod
    def zeros(cls, state_count: int, action_count: int) -> "QTable":
        return cls(np.zeros((state_count, action_count)))

    @property
    def state_count(self) -> int:
        return self.values.shape[0]

    @property
    def action_count(self) -> int:
        return self.values.shape[1]


def greedy_action(q: QTable, s: int) -> int:
    """Smallest action index attaining the row maximum."""
    return int(np.argmax(q.values[s]))


def epsilon_greedy(q: QTable, s: int, epsilon: float, rng: SplitMix64) -> int:
    """Uniform random action with probability epsilon, else greedy.

    Always consumes exactly one uniform draw for the explore/exploit coin,
    plus one range draw when exploring; callers relying on reproducibility
    can count on that order.
    """
    if rng.random() < epsilon:
        return rng.randrange(q.action_count)
    return greedy_action(q, s)


def td_target(reward: float, q: QTable, s_next: int, gamma: float, terminal: bool) -> float:
    """Bootstrapped one-step target; terminal transitions use the reward alone."""
    if terminal:
        return reward
    return reward + gamma * float(q.values[s_next].max())


def classic_update(q: QTable, s: int, a: int, q_val: float, alpha: float) -> None:
    q.values[s, a] += alpha * (q_val - q.values[s, a])


@lru_cache(maxsize=None)
def _state_neighbors_cached(s: int, delta_s: float, size: int) -> tuple[int, ...]:
    x, y = divmod(s, size)
    r = int(delta_s)
    out = []
    for dx in range(-r, r + 1):
        nx = x + dx
        if not 0 <= nx < size:
            continue
        for dy in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            ny = y + dy
            if 0 <= ny < size and math.sqrt(dx * dx + dy * dy) <= delta_s:
                out.append(nx * size + ny)
    return tuple(out)


def state_neighbors(s: int, delta_s: float, size: int = 64) -> list[int]:
    """Grid states within Euclidean distance delta_s of s, excluding s itself."""
    return list(_state_neighbors_cached(s, delta_s, size))


def action_neighbors(a: int, delta_a: float, action_values: np.ndarray) -> list[int]:
    """Action indices whose values lie within delta_a of action a's value, self excluded."""
    values = np.atleast_2d(np.asarray(action_values, dtype=float))
    if values.shape[0] == 1 and values.shape[1] > 1:
        values = values.T
    diffs = values - values[a]
    dists = np.sqrt((diffs * diffs).sum(axis=1))
    out = [i for i in range(values.shape[0]) if i != a and dists[i] <= delta_a]
    return out


def smooth_state_update(q: QTable, s: int, a: int, q_val: float,
                        params: TabularHyperParams, size: int = 64) -> None:
    """Pull Q(s', a) toward q_val for every state neighbor s' of s.

    Equivalent to one classic update per neighbor with the interpolated
    target (1 - beta_s) * Q(s', a) + beta_s * q_val; expects the classic
    update for (s, a) itself to have been applied already.
    """
    rate = params.alpha * params.beta_s
    qv = q.values
    for s2 in state_neighbors(s, params.delta_s, size):
        qv[s2, a] += rate * (q_val - qv[s2, a])


def smooth_action_update(q: QTable, s: int, a: int, q_val: float,
                         params: TabularHyperParams, action_values: np.ndarray) -> None:
    """Pull Q(s, a') toward q_val for every action neighbor a' of a."""
    rate = params.alpha * params.beta_a
    qv = q.values
    for a2 in action_neighbors(a, params.delta_a, action_values):
        qv[s, a2] += rate * (q_val - qv[s, a2])


def train_episode(env, q: QTable, params: TabularHyperParams, rng: SplitMix64,
                  smooth: str = "none", max_steps: int | None = None,
                  on_step: Callable | None = None) -> tuple[int, float]:
    """Run one epsilon-greedy episode, updating the table in place.

    smooth selects the neighbor pass applied after each classic update:
    "none", "state", "action" or "both". Returns (steps, undiscounted return).
    The optional on_step(step, s, a, reward, s_next, terminal) callback fires
    after each step's updates, for tracing and telemetry.
    """
    if smooth not in ("none", "state", "action", "both"):
        raise ValueError(f"unknown smooth mode {smooth!r}")
    smooth_s = smooth in ("state", "both") and params.beta_s > 0.0
    smooth_a = smooth in ("action", "both") and params.beta_a > 0.0
    cap = env.max_steps if max_steps is None else max_steps

    qv = q.values
    n_actions = env.action_count
    alpha, gamma, eps = params.alpha, params.gamma, params.epsilon
    rate_s = alpha * params.beta_s
    rate_a = alpha * params.beta_a
    size = env.size
    delta_s = params.delta_s
    neighbors_of = _state_neighbors_cached

    nbrs_a: list[list[int]] | None = None
    if smooth_a:
        values = env.action_values
        nbrs_a = [action_neighbors(i, params.delta_a, values) for i in range(n_actions)]

    rng_random = rng.random
    transitions = env.transitions()
    s = env.state_index(env.reset(rng))
    total = 0.0
    steps = 0
    for step in range(cap):
        if rng_random() < eps:
            a = rng.randrange(n_actions)
        else:
            a = int(qv[s].argmax())
        ns, r, terminal = transitions[s][a]
        target = r if terminal else r + gamma * max(qv[ns].tolist())
        qv[s, a] += alpha * (target - qv[s, a])
        if smooth_s:
            for s2 in neighbors_of(s, delta_s, size):
                qv[s2, a] += rate_s * (target - qv[s2, a])
        if smooth_a:
            for a2 in nbrs_a[a]:
                qv[s, a2] += rate_a * (target - qv[s, a2])
        total += r
        steps = step + 1
        if on_step is not None:
            on_step(step, s, a, r, ns, terminal)
        s = ns
        if terminal:
            break
    return steps, total
