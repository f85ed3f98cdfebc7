"""Smooth deep Q-learning: replay memory, target network, neighbor-smoothed loss.

The training loss is l0 + l1 where l0 is the usual sum of squared TD errors
on the taken actions and l1 additionally regresses the network's outputs at
neighboring actions (within delta_a of the taken action's value, the taken
action itself excluded) onto the same target, scaled by the smooth rate
beta. beta = 0 skips the neighbor terms entirely and reproduces plain DQN
with replay and a periodically synchronized target network.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .mlp import (Gradients, MlpParams, apply_update, backward, copy_params, forward,
                  init_params, mlp_spec)
from .rng import SplitMix64
from .tabular import action_neighbors


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool


class ReplayBuffer:
    """Fixed-capacity ring; once full, each push evicts the oldest element."""

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._cursor = 0  # overwrite position once full

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Transition]:
        """Contents in insertion order, oldest first."""
        if len(self._items) < self.capacity:
            yield from self._items
        else:
            yield from self._items[self._cursor:]
            yield from self._items[: self._cursor]

    def push(self, t: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(t)
        else:
            self._items[self._cursor] = t
            self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng: SplitMix64) -> list[Transition]:
        """Uniform sample with replacement; requires size >= batch_size."""
        if len(self._items) < batch_size:
            raise ValueError(f"buffer holds {len(self._items)} < batch size {batch_size}")
        n = len(self._items)
        return [self._items[rng.randrange(n)] for _ in range(batch_size)]


@dataclass
class DqnHyperParams:
    alpha: float = 1e-4
    gamma: float = 0.99
    epsilon: float = 0.1
    beta: float = 0.0
    delta_a: float | None = None  # None: one action-grid step (plus tolerance)
    sync_every: int = 500
    capacity: int = 50_000
    batch_size: int = 64
    warmup: int = 1_000

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.delta_a is not None and self.delta_a < 0.0:
            raise ValueError(f"delta_a must be >= 0, got {self.delta_a}")
        if self.sync_every < 1 or self.capacity < 1 or self.batch_size < 1:
            raise ValueError("sync_every, capacity and batch_size must be >= 1")
        if self.warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {self.warmup}")


def default_action_radius(action_values: np.ndarray) -> float:
    """One step of the action grid, padded so float rounding keeps adjacency."""
    values = np.atleast_2d(np.asarray(action_values, dtype=float))
    if values.shape[0] == 1 and values.shape[1] > 1:
        values = values.T
    gap = float(np.sqrt(((values[1] - values[0]) ** 2).sum()))
    return gap + 1e-9


class DqnAgent:
    """Online network, frozen target copy, replay memory and step counter."""

    def __init__(self, input_dim: int, action_values: np.ndarray, hp: DqnHyperParams,
                 rng: SplitMix64, hidden: tuple[int, ...] = (64, 64)):
        values = np.atleast_2d(np.asarray(action_values, dtype=float))
        if values.shape[0] == 1 and values.shape[1] > 1:
            values = values.T
        self.hp = hp
        self.action_count = values.shape[0]
        self.delta_a = hp.delta_a if hp.delta_a is not None else default_action_radius(values)
        self.neighbors = [action_neighbors(i, self.delta_a, values)
                          for i in range(self.action_count)]
        self.params = init_params(mlp_spec(input_dim, self.action_count, hidden), rng)
        self.target = copy_params(self.params)
        self.total_steps = 0

        self.buffer = ReplayBuffer(hp.capacity)

    @property
    def warmup_size(self) -> int:
        """No gradient steps until the buffer holds this many transitions."""
        return max(self.hp.batch_size, self.hp.warmup)

    def sync_target(self) -> None:
        self.target = copy_params(self.params)


def act(agent: DqnAgent, features: np.ndarray, epsilon: float, rng: SplitMix64) -> int:
    """Epsilon-greedy over the online network, smallest-index tie-break.

    Always consumes one uniform draw, plus one range draw when exploring.
    """
    if rng.random() < epsilon:
        return rng.randrange(agent.action_count)
    return int(np.argmax(forward(agent.params, features)))


def compute_target(t: Transition, target_params: MlpParams, gamma: float) -> float:
    """r + gamma * max over the target network's outputs; r alone when terminal."""
    if t.terminal:
        return t.reward
    return t.reward + gamma * float(forward(target_params, t.next_state).max())


def batch_targets(batch: Sequence[Transition], target_params: MlpParams, gamma: float) -> np.ndarray:
    """Vectorized compute_target over a batch."""
    next_states = np.stack([t.next_state for t in batch])
    rewards = np.array([t.reward for t in batch])
    terminal = np.array([t.terminal for t in batch])
    best_next = forward(target_params, next_states).max(axis=1)
    return np.where(terminal, rewards, rewards + gamma * best_next)


def loss_l0(batch: Sequence[Transition], params: MlpParams, targets: np.ndarray) -> float:
    """Sum over the batch of squared TD errors on the taken actions."""
    states = np.stack([t.state for t in batch])
    actions = [t.action for t in batch]
    outputs = forward(params, states)
    taken = outputs[np.arange(len(batch)), actions]
    return float(((targets - taken) ** 2).sum())


def loss_l1(batch: Sequence[Transition], params: MlpParams, targets: np.ndarray,
            beta: float, delta_a: float, action_values: np.ndarray) -> float:
    """beta times the squared errors between each target and the outputs at
    the taken action's neighbors (self excluded)."""
    if beta == 0.0:
        return 0.0
    states = np.stack([t.state for t in batch])
    outputs = forward(params, states)
    total = 0.0
    for j, t in enumerate(batch):
        for a2 in action_neighbors(t.action, delta_a, action_values):
            total += (targets[j] - outputs[j, a2]) ** 2
    return float(beta * total)


def loss_gradients(batch: Sequence[Transition], params: MlpParams, targets: np.ndarray,
                   beta: float, neighbor_lists: Sequence[Sequence[int]]) -> Gradients:
    """Gradient of l0 + l1 with respect to params, accumulated over the batch.

    The output-error row for sample j carries 2*(Q - q_j) at the taken action
    and 2*beta*(Q - q_j) at each neighboring action, so a single backward
    pass yields the full gradient.
    """
    states = np.stack([t.state for t in batch])
    outputs = forward(params, states)
    err = np.zeros_like(outputs)
    rows = np.arange(len(batch))
    actions = [t.action for t in batch]
    err[rows, actions] = 2.0 * (outputs[rows, actions] - targets)
    if beta > 0.0:
        for j, a in enumerate(actions):
            for a2 in neighbor_lists[a]:
                err[j, a2] = 2.0 * beta * (outputs[j, a2] - targets[j])
    return backward(params, states, err)


def train_step(agent: DqnAgent, batch: Sequence[Transition]) -> None:
    """One descent step on l0 + l1 over the minibatch."""
    hp = agent.hp
    targets = batch_targets(batch, agent.target, hp.gamma)
    grads = loss_gradients(batch, agent.params, targets, hp.beta, agent.neighbors)
    apply_update(agent.params, grads, hp.alpha)


def train_episode(agent: DqnAgent, env, rng: SplitMix64,
                  on_step: Callable | None = None) -> tuple[int, float]:
    """Run one episode, learning online. Returns (steps, undiscounted return).

    Per-step order (fixed for reproducibility): epsilon-greedy action, env
    step, push transition, then once the buffer has warmup_size elements a
    minibatch sample and gradient step, then the periodic target sync. The
    optional on_step(step, agent, transition) callback fires last.
    """
    hp = agent.hp
    s = env.reset(rng)
    feats = env.encode(s)
    total = 0.0
    steps = 0
    for step in range(env.max_steps):
        a = act(agent, feats, hp.epsilon, rng)
        result = env.step(s, a)
        next_feats = env.encode(result.next_state)
        t = Transition(feats, a, result.reward, next_feats, result.terminal)
        agent.buffer.push(t)
        if len(agent.buffer) >= agent.warmup_size:
            batch = agent.buffer.sample(hp.batch_size, rng)
            train_step(agent, batch)
        agent.total_steps += 1
        if agent.total_steps % hp.sync_every == 0:
            agent.sync_target()
        total += result.reward
        steps = step + 1
        if on_step is not None:
            on_step(step, agent, t)
        s = result.next_state
        feats = next_feats
        if result.terminal:
            break
    return steps, total
