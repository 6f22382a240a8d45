"""Feedforward Q-network with exact backpropagation (numpy, float64)."""
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from crossvote.errors import DimensionError

DEFAULT_HIDDEN = (64, 64)
N_ACTIONS = 2


@dataclass
class Mlp:
    """
    Affine layers with ReLU between them and an identity output head.
    weights[l] has shape (out, in); biases[l] has shape (out,).
    """
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def __post_init__(self):
        if len(self.weights) == 0 or len(self.weights) != len(self.biases):
            raise DimensionError("an Mlp needs one bias vector per weight matrix")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise DimensionError(f"layer {l}: weight {w.shape} and bias {b.shape} disagree")
            if l > 0 and w.shape[1] != self.weights[l - 1].shape[0]:
                raise DimensionError(f"layer {l} expects {w.shape[1]} inputs, previous layer gives "
                                     f"{self.weights[l - 1].shape[0]}")

    @property
    def layer_dims(self) -> Tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    @classmethod
    def initialize(cls, layer_dims: Sequence[int], rng: np.random.Generator) -> "Mlp":
        """Uniform in ±sqrt(6 / (fan_in + fan_out)); biases start at 0."""
        dims = tuple(int(d) for d in layer_dims)
        if len(dims) < 2 or min(dims) < 1:
            raise DimensionError(f"invalid layer dims {dims}")
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases)

    @classmethod
    def zeros(cls, layer_dims: Sequence[int]) -> "Mlp":
        dims = tuple(int(d) for d in layer_dims)
        return cls(
            [np.zeros((o, i)) for i, o in zip(dims[:-1], dims[1:])],
            [np.zeros(o) for o in dims[1:]],
        )

    def copy(self) -> "Mlp":
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def parameters(self) -> List[np.ndarray]:
        """Parameters in checkpoint order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def flat_parameters(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.parameters()])


@dataclass
class MlpGrads:
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(g * g)) for g in self.weights + self.biases)))

    def scaled(self, factor: float) -> "MlpGrads":
        return MlpGrads([g * factor for g in self.weights], [g * factor for g in self.biases])

    def clipped(self, max_norm: float) -> "MlpGrads":
        norm = self.global_norm()
        if norm <= max_norm or norm == 0.0:
            return self
        return self.scaled(max_norm / norm)


# ---------------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------------

def _as_matrix(net: Mlp, obs: np.ndarray) -> np.ndarray:
    x = np.asarray(obs, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise DimensionError(f"observation of shape {np.shape(obs)} does not match input dim {net.input_dim}")
    return x


def _forward_cache(net: Mlp, x: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Activations (input included) and pre-activations of every layer."""
    activations = [x]
    pre = []
    last = len(net.weights) - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = activations[-1] @ w.T + b
        pre.append(z)
        activations.append(z if l == last else np.maximum(z, 0.0))
    return activations, pre


def forward_batch(net: Mlp, obs: np.ndarray) -> np.ndarray:
    """Q-values for a batch of observations, shape (n, output_dim)."""
    activations, _ = _forward_cache(net, _as_matrix(net, obs))
    return activations[-1]


def forward(net: Mlp, obs: np.ndarray) -> np.ndarray:
    """Q-vector of a single observation."""
    return forward_batch(net, obs)[0]


# ---------------------------------------------------------------------------
# Loss and gradients
# ---------------------------------------------------------------------------

BatchLike = Union[Tuple[np.ndarray, np.ndarray, np.ndarray], Sequence[Tuple[np.ndarray, int, float]]]


def _unpack(net: Mlp, batch: BatchLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(batch, tuple) and len(batch) == 3 and isinstance(batch[0], np.ndarray) and batch[0].ndim == 2:
        obs, actions, targets = batch
    else:
        if len(batch) == 0:
            raise DimensionError("empty batch")
        obs = np.stack([np.asarray(o, dtype=np.float64) for o, _, _ in batch])
        actions = np.array([a for _, a, _ in batch])
        targets = np.array([t for _, _, t in batch], dtype=np.float64)
    obs = _as_matrix(net, obs)
    actions = np.asarray(actions, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.float64)
    if len(obs) == 0:
        raise DimensionError("empty batch")
    if actions.shape != (len(obs),) or targets.shape != (len(obs),):
        raise DimensionError("obs, actions and targets must have the same length")
    if actions.min() < 0 or actions.max() >= net.output_dim:
        raise DimensionError(f"action index outside [0, {net.output_dim})")
    return obs, actions, targets


def loss(net: Mlp, batch: BatchLike) -> float:
    """Mean squared error between Q(obs)[action] and the target."""
    obs, actions, targets = _unpack(net, batch)
    q = forward_batch(net, obs)[np.arange(len(obs)), actions]
    return float(np.mean((q - targets) ** 2))


def gradients(net: Mlp, batch: BatchLike) -> MlpGrads:
    """Gradient of loss() with respect to every weight and bias."""
    obs, actions, targets = _unpack(net, batch)
    n = len(obs)
    activations, pre = _forward_cache(net, obs)

    rows = np.arange(n)
    delta = np.zeros_like(activations[-1])
    delta[rows, actions] = 2.0 * (activations[-1][rows, actions] - targets) / n

    grad_w: List[np.ndarray] = [np.empty(0)] * len(net.weights)
    grad_b: List[np.ndarray] = [np.empty(0)] * len(net.weights)
    for l in range(len(net.weights) - 1, -1, -1):
        grad_w[l] = delta.T @ activations[l]
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ net.weights[l]) * (pre[l - 1] > 0.0)
    return MlpGrads(grad_w, grad_b)


def optimizer_step(net: Mlp, grads: MlpGrads, lr: float) -> None:
    """Plain gradient descent, in place."""
    if len(grads.weights) != len(net.weights):
        raise DimensionError("gradient layer count does not match the network")
    for param, grad in zip(net.weights + net.biases, grads.weights + grads.biases):
        if param.shape != grad.shape:
            raise DimensionError(f"gradient shape {grad.shape} does not match parameter {param.shape}")
    for l in range(len(net.weights)):
        net.weights[l] -= lr * grads.weights[l]
        net.biases[l] -= lr * grads.biases[l]
