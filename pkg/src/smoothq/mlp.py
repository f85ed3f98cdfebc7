"""Minimal feed-forward network with manual backpropagation (numpy only).

The network maps a state feature vector to one value per discrete action.
backward() takes the derivative of the loss with respect to each output,
which lets a single pass accumulate gradients for losses that touch several
outputs at once (the taken action plus its smoothed neighbors).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .rng import SplitMix64

_HEADER_MAGIC = "smoothq-mlp-v1"


@dataclass(frozen=True)
class LayerSpec:
    input_dim: int
    output_dim: int
    activation: str = "relu"  # "relu" | "identity"


@dataclass
class MlpParams:
    weights: list[np.ndarray]  # weights[k] has shape (in_k, out_k)
    biases: list[np.ndarray]  # biases[k] has shape (out_k,)
    activations: list[str]


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def mlp_spec(input_dim: int, action_count: int, hidden: tuple[int, ...] = (64, 64)) -> list[LayerSpec]:
    """Default architecture: rectifier hidden layers, identity output head."""
    dims = (input_dim, *hidden, action_count)
    specs = [LayerSpec(dims[i], dims[i + 1], "relu") for i in range(len(dims) - 2)]
    specs.append(LayerSpec(dims[-2], dims[-1], "identity"))
    return specs


def _validate_chain(specs: list[LayerSpec]) -> None:
    if not specs:
        raise ValueError("empty layer chain")
    for k, spec in enumerate(specs):
        if spec.input_dim <= 0 or spec.output_dim <= 0:
            raise ValueError(f"layer {k} has non-positive dimensions")
        if spec.activation not in ("relu", "identity"):
            raise ValueError(f"layer {k} has unknown activation {spec.activation!r}")
        if k > 0 and spec.input_dim != specs[k - 1].output_dim:
            raise ValueError(f"layer {k} input dim {spec.input_dim} != previous output")
    if specs[-1].activation != "identity":
        raise ValueError("final layer must use the identity activation")


def init_params(specs: list[LayerSpec], rng: SplitMix64) -> MlpParams:
    """Glorot-uniform weights (drawn in row-major order), zero biases."""
    _validate_chain(specs)
    weights, biases, activations = [], [], []
    for spec in specs:
        bound = math.sqrt(6.0 / (spec.input_dim + spec.output_dim))
        n = spec.input_dim * spec.output_dim
        w = np.array([rng.uniform(-bound, bound) for _ in range(n)])
        weights.append(w.reshape(spec.input_dim, spec.output_dim))
        biases.append(np.zeros(spec.output_dim))
        activations.append(spec.activation)
    return MlpParams(weights, biases, activations)


def forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Evaluate the network; accepts a single vector or a (batch, in) array."""
    h = np.asarray(x, dtype=float)
    if h.shape[-1] != params.weights[0].shape[0]:
        raise ValueError(f"input width {h.shape[-1]} != {params.weights[0].shape[0]}")
    for w, b, act in zip(params.weights, params.biases, params.activations):
        h = h @ w + b
        if act == "relu":
            h = np.maximum(h, 0.0)
    return h


def backward(params: MlpParams, x: np.ndarray, output_error: np.ndarray) -> Gradients:
    """Gradients of a loss whose per-output derivative is output_error.

    output_error must match the network output shape; batch inputs accumulate
    (sum) gradients over the batch.
    """
    x2 = np.atleast_2d(np.asarray(x, dtype=float))
    err = np.atleast_2d(np.asarray(output_error, dtype=float))
    n_layers = len(params.weights)

    # forward pass, caching pre-activations
    pre: list[np.ndarray] = []
    acts: list[np.ndarray] = [x2]
    h = x2
    for w, b, act in zip(params.weights, params.biases, params.activations):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0) if act == "relu" else z
        acts.append(h)
    if err.shape != h.shape:
        raise ValueError(f"output error shape {err.shape} != output shape {h.shape}")

    grad_w = [np.empty(0)] * n_layers
    grad_b = [np.empty(0)] * n_layers
    delta = err
    for k in reversed(range(n_layers)):
        if params.activations[k] == "relu":
            delta = delta * (pre[k] > 0.0)
        grad_w[k] = acts[k].T @ delta
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = delta @ params.weights[k].T
    return Gradients(grad_w, grad_b)


def apply_update(params: MlpParams, grads: Gradients, alpha: float) -> None:
    """One fixed-step descent update, in place: theta <- theta - alpha * grad."""
    for w, gw in zip(params.weights, grads.weights):
        w -= alpha * gw
    for b, gb in zip(params.biases, grads.biases):
        b -= alpha * gb


def copy_params(params: MlpParams) -> MlpParams:
    return MlpParams([w.copy() for w in params.weights],
                     [b.copy() for b in params.biases],
                     list(params.activations))


def save_params(params: MlpParams, path: str) -> None:
    """Checkpoint format: one JSON header line, then raw float64 arrays
    in layer order (weights then bias per layer), row-major."""
    header = {
        "magic": _HEADER_MAGIC,
        "layers": [
            {"input_dim": int(w.shape[0]), "output_dim": int(w.shape[1]), "activation": act}
            for w, act in zip(params.weights, params.activations)
        ],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for w, b in zip(params.weights, params.biases):
            fh.write(np.ascontiguousarray(w, dtype=np.float64).tobytes())
            fh.write(np.ascontiguousarray(b, dtype=np.float64).tobytes())


def load_params(path: str) -> MlpParams:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("magic") != _HEADER_MAGIC:
            raise ValueError(f"{path} is not a recognized checkpoint")
        weights, biases, activations = [], [], []
        for layer in header["layers"]:
            fi, fo = layer["input_dim"], layer["output_dim"]
            w = np.frombuffer(fh.read(8 * fi * fo), dtype=np.float64).reshape(fi, fo)
            b = np.frombuffer(fh.read(8 * fo), dtype=np.float64)
            weights.append(w.copy())
            biases.append(b.copy())
            activations.append(layer["activation"])
    return MlpParams(weights, biases, activations)
