"""Supervised recognition of emotional states from the 12-component voice vector.

A single-hidden-layer network (tanh hidden, softmax output, cross-entropy
loss) trained by mini-batch gradient descent with momentum.  Everything is
seeded and reproducible: identical seeds and data give bitwise-identical
parameters and loss curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .features import FeatureVector12

INPUT_WIDTH = 12

MODEL_FORMAT = "emotionnet"
MODEL_VERSION = 1


class EmotionError(ValueError):
    """Raised for invalid network configuration, data, or diverged training."""


@dataclass(frozen=True)
class EmotionStateList:
    """Ordered list of recognizable emotional states; contents are configuration."""

    states: tuple[str, ...]

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        if len(states) < 2:
            raise EmotionError("need at least 2 emotional states")
        if len(set(states)) != len(states):
            raise EmotionError("emotional state names must be unique")
        for s in states:
            if not s or any(ch.isspace() for ch in s) or "," in s:
                raise EmotionError(f"bad state identifier {s!r}")
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise EmotionError(f"unknown emotional state {state!r}") from None


@dataclass(frozen=True)
class EmotionNet:
    """Network parameters: layers [12, hidden, S], tanh then softmax."""

    states: EmotionStateList
    w1: np.ndarray  # (hidden, 12)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (S, hidden)
    b2: np.ndarray  # (S,)
    rng_seed: int

    def __post_init__(self):
        s = len(self.states)
        hidden = self.w1.shape[0]
        if self.w1.shape != (hidden, INPUT_WIDTH) or self.b1.shape != (hidden,):
            raise EmotionError("hidden layer shape mismatch")
        if self.w2.shape != (s, hidden) or self.b2.shape != (s,):
            raise EmotionError("output layer shape mismatch")
        for arr in (self.w1, self.b1, self.w2, self.b2):
            if not np.all(np.isfinite(arr)):
                raise EmotionError("network parameters must be finite")

    @property
    def hidden(self) -> int:
        return self.w1.shape[0]

    def parameter_count(self) -> int:
        return self.w1.size + self.b1.size + self.w2.size + self.b2.size

    def params_equal(self, other: "EmotionNet") -> bool:
        return (
            self.states == other.states
            and np.array_equal(self.w1, other.w1)
            and np.array_equal(self.b1, other.b1)
            and np.array_equal(self.w2, other.w2)
            and np.array_equal(self.b2, other.b2)
        )


@dataclass(frozen=True)
class EmotionDistribution:
    """Softmax output over the state list; argmax ties break to the lowest index."""

    probs: tuple[float, ...]
    argmax: int

    def __post_init__(self):
        if any(p < 0.0 for p in self.probs):
            raise EmotionError("probabilities must be non-negative")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise EmotionError("probabilities must sum to 1")


@dataclass(frozen=True)
class TrainingSet:
    """Labeled feature rows plus the optimizer hyperparameters."""

    vectors: np.ndarray  # (n, 12)
    labels: np.ndarray   # (n,) int
    learning_rate: float = 0.05
    momentum: float = 0.9
    epochs: int = 200
    batch_size: int = 16
    rng_seed: int = 0

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if vectors.ndim != 2 or vectors.shape[1] != INPUT_WIDTH:
            raise EmotionError(f"training vectors must be (n, {INPUT_WIDTH})")
        if labels.shape != (vectors.shape[0],):
            raise EmotionError("one label per training vector required")
        if vectors.shape[0] == 0:
            raise EmotionError("empty training set")
        if labels.min() < 0:
            raise EmotionError("labels must be non-negative state indices")
        if self.epochs < 0 or self.batch_size < 1 or self.learning_rate < 0.0:
            raise EmotionError("bad training hyperparameters")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)


def init_network(state_list: EmotionStateList, hidden: int, seed: int) -> EmotionNet:
    """Fresh network: weights from U(-1/sqrt(fan_in), +1/sqrt(fan_in)), zero biases."""
    if hidden < 1:
        raise EmotionError("hidden width must be >= 1")
    rng = np.random.default_rng(seed)
    s = len(state_list)
    lim1 = 1.0 / math.sqrt(INPUT_WIDTH)
    lim2 = 1.0 / math.sqrt(hidden)
    return EmotionNet(
        states=state_list,
        w1=rng.uniform(-lim1, lim1, size=(hidden, INPUT_WIDTH)),
        b1=np.zeros(hidden),
        w2=rng.uniform(-lim2, lim2, size=(s, hidden)),
        b2=np.zeros(s),
        rng_seed=seed,
    )


def _as_input(v) -> np.ndarray:
    if isinstance(v, FeatureVector12):
        arr = np.asarray(v.values, dtype=np.float64)
    else:
        arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (INPUT_WIDTH,):
        raise EmotionError(f"input must have {INPUT_WIDTH} components")
    if not np.all(np.isfinite(arr)):
        raise EmotionError("input components must be finite")
    return arr


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def forward(net: EmotionNet, v) -> EmotionDistribution:
    """Softmax distribution over states for one feature vector."""
    x = _as_input(v)
    h = np.tanh(net.w1 @ x + net.b1)
    p = _softmax(net.w2 @ h + net.b2)
    return EmotionDistribution(probs=tuple(float(q) for q in p), argmax=int(np.argmax(p)))


def classify(net: EmotionNet, v) -> str:
    """The recognized emotional state: argmax of forward, ties to the lowest index."""
    return net.states.states[forward(net, v).argmax]


def _batch_forward(net_params, x: np.ndarray):
    w1, b1, w2, b2 = net_params
    h = np.tanh(x @ w1.T + b1)
    p = _softmax(h @ w2.T + b2)
    return h, p


def dataset_loss(net: EmotionNet, data: TrainingSet) -> float:
    """Mean cross-entropy of the network on the whole training set."""
    _, p = _batch_forward((net.w1, net.b1, net.w2, net.b2), data.vectors)
    picked = p[np.arange(len(data.labels)), data.labels]
    return float(-np.mean(np.log(np.maximum(picked, 1e-300))))


def accuracy(net: EmotionNet, data: TrainingSet) -> float:
    _, p = _batch_forward((net.w1, net.b1, net.w2, net.b2), data.vectors)
    return float(np.mean(np.argmax(p, axis=1) == data.labels))


def _gradients(params, x: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy gradients for a batch."""
    w1, b1, w2, b2 = params
    n = x.shape[0]
    h, p = _batch_forward(params, x)
    dz2 = p.copy()
    dz2[np.arange(n), labels] -= 1.0
    dz2 /= n
    gw2 = dz2.T @ h
    gb2 = dz2.sum(axis=0)
    dh = dz2 @ w2
    dz1 = dh * (1.0 - h**2)
    gw1 = dz1.T @ x
    gb1 = dz1.sum(axis=0)
    return gw1, gb1, gw2, gb2


def train(net: EmotionNet, data: TrainingSet) -> tuple[EmotionNet, list[float]]:
    """Mini-batch gradient descent with momentum.

    Returns the trained network and the loss curve [before epoch 1, after
    epoch 1, ..., after the final epoch].  Raises "diverged" naming the epoch
    if the loss stops being finite.
    """
    s = len(net.states)
    if data.labels.max() >= s:
        raise EmotionError(f"label {int(data.labels.max())} out of range for {s} states")
    params = [net.w1.copy(), net.b1.copy(), net.w2.copy(), net.b2.copy()]
    velocity = [np.zeros_like(p) for p in params]
    shuffle_rng = np.random.default_rng(data.rng_seed)
    n = data.vectors.shape[0]

    def loss_now() -> float:
        _, p = _batch_forward(params, data.vectors)
        picked = p[np.arange(n), data.labels]
        return float(-np.mean(np.log(np.maximum(picked, 1e-300))))

    curve = [loss_now()]
    for epoch in range(1, data.epochs + 1):
        order = shuffle_rng.permutation(n)
        for start in range(0, n, data.batch_size):
            idx = order[start : start + data.batch_size]
            grads = _gradients(params, data.vectors[idx], data.labels[idx])
            for i in range(4):
                velocity[i] = data.momentum * velocity[i] - data.learning_rate * grads[i]
                params[i] = params[i] + velocity[i]
        epoch_loss = loss_now()
        if not math.isfinite(epoch_loss):
            raise EmotionError(f"diverged at epoch {epoch}")
        curve.append(epoch_loss)
    trained = replace(net, w1=params[0], b1=params[1], w2=params[2], b2=params[3])
    return trained, curve


# ---------------------------------------------------------------------------
# Gradient verification
# ---------------------------------------------------------------------------


def _flatten(params) -> np.ndarray:
    return np.concatenate([p.ravel() for p in params])


def _single_loss(params, x: np.ndarray, label: int) -> float:
    _, p = _batch_forward(params, x[None, :])
    return float(-np.log(max(p[0, label], 1e-300)))


def gradient_check(net: EmotionNet, sample: tuple, step: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    Relative error per parameter is |ga - gn| / max(|ga| + |gn|, 1e-4); the
    floor keeps near-zero gradients from amplifying finite-difference noise.
    """
    v, label = sample
    x = _as_input(v)
    label = int(label)
    params = [net.w1.copy(), net.b1.copy(), net.w2.copy(), net.b2.copy()]
    analytic = _flatten(_gradients(params, x[None, :], np.array([label])))
    flat = _flatten(params)
    shapes = [p.shape for p in params]
    sizes = [p.size for p in params]

    def unflatten(vec: np.ndarray):
        out, pos = [], 0
        for shape, size in zip(shapes, sizes):
            out.append(vec[pos : pos + size].reshape(shape))
            pos += size
        return out

    numeric = np.empty_like(flat)
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] += step
        up = _single_loss(unflatten(bumped), x, label)
        bumped[i] -= 2.0 * step
        down = _single_loss(unflatten(bumped), x, label)
        numeric[i] = (up - down) / (2.0 * step)
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-4)
    return float(np.max(np.abs(analytic - numeric) / denom))


# ---------------------------------------------------------------------------
# Persistence: versioned flat text, diff-able and language-neutral
# ---------------------------------------------------------------------------


def model_to_text(net: EmotionNet) -> str:
    """Canonical flat-text serialization; floats kept at full precision."""
    lines = [
        f"{MODEL_FORMAT} v{MODEL_VERSION}",
        "states " + ",".join(net.states.states),
        f"layers {INPUT_WIDTH} {net.hidden} {len(net.states)}",
        "activation tanh softmax",
        f"seed {net.rng_seed}",
    ]
    for name, arr in (("W1", net.w1), ("b1", net.b1), ("W2", net.w2), ("b2", net.b2)):
        mat = np.atleast_2d(arr)
        lines.append(f"param {name} {mat.shape[0]} {mat.shape[1]}")
        for row in mat:
            lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def save_model(net: EmotionNet, path) -> None:
    with open(path, "w") as fh:
        fh.write(model_to_text(net))


def load_model(path) -> EmotionNet:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != f"{MODEL_FORMAT} v{MODEL_VERSION}":
        raise EmotionError(f"unsupported model file header: {lines[0] if lines else 'empty'!r}")
    header: dict[str, str] = {}
    pos = 1
    while pos < len(lines) and not lines[pos].startswith("param "):
        key, _, value = lines[pos].partition(" ")
        header[key] = value
        pos += 1
    try:
        states = EmotionStateList(tuple(header["states"].split(",")))
        widths = [int(w) for w in header["layers"].split()]
        seed = int(header["seed"])
    except (KeyError, ValueError) as exc:
        raise EmotionError(f"malformed model header: {exc}") from exc
    if len(widths) != 3 or widths[0] != INPUT_WIDTH or widths[2] != len(states):
        raise EmotionError(f"inconsistent layer spec {widths}")

    params: dict[str, np.ndarray] = {}
    while pos < len(lines):
        if not lines[pos].startswith("param "):
            raise EmotionError(f"expected param block at line {pos + 1}")
        _, name, rows, cols = lines[pos].split()
        rows, cols = int(rows), int(cols)
        block = lines[pos + 1 : pos + 1 + rows]
        if len(block) != rows:
            raise EmotionError(f"truncated param block {name}")
        params[name] = np.array([[float(v) for v in ln.split()] for ln in block])
        if params[name].shape != (rows, cols):
            raise EmotionError(f"param block {name} shape mismatch")
        pos += 1 + rows
    try:
        return EmotionNet(
            states=states,
            w1=params["W1"],
            b1=params["b1"][0],
            w2=params["W2"],
            b2=params["b2"][0],
            rng_seed=seed,
        )
    except KeyError as exc:
        raise EmotionError(f"model file missing parameter block {exc}") from exc
