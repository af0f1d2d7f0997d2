"""Classical multilayer perceptron baseline with a softmax head.

Hidden layers use a sigmoid or tanh activation; the output layer is affine
followed by softmax, trained on mean cross-entropy against one-hot labels.
Training is full-batch: plain gradient descent or Adam.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gradcheck import central_difference, relative_error
from .metrics import MetricsRecord

ACTIVATIONS = ("sigmoid", "tanh")
OPTIMIZERS = ("gd", "adam")


@dataclass
class MlpNetwork:
    weights: list  # weights[l] has shape (inputs, outputs)
    biases: list
    activation: str = "sigmoid"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        self.weights = [np.array(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.array(b, dtype=np.float64) for b in self.biases]
        if not self.weights or len(self.weights) != len(self.biases):
            raise ValueError("need one bias vector per weight matrix")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError("bias length must equal the layer's output width")
        for prev, nxt in zip(self.weights, self.weights[1:]):
            if nxt.shape[0] != prev.shape[1]:
                raise ValueError("consecutive layer shapes do not compose")

    @classmethod
    def initialize(cls, n_features, hidden, n_classes, seed=0, scale=0.5, activation="sigmoid"):
        """Weights and biases drawn from U[-scale, scale]."""
        rng = np.random.default_rng(seed)
        sizes = [n_features, *hidden, n_classes]
        weights, biases = [], []
        for n_in, n_out in zip(sizes, sizes[1:]):
            weights.append(rng.uniform(-scale, scale, (n_in, n_out)))
            biases.append(rng.uniform(-scale, scale, n_out))
        return cls(weights, biases, activation)

    @property
    def n_features(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_classes(self) -> int:
        return self.weights[-1].shape[1]

    def params(self) -> list:
        return [*self.weights, *self.biases]

    def copy(self) -> "MlpNetwork":
        return MlpNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                          self.activation)


def _act(z, kind):
    if kind == "sigmoid":
        return 0.5 * (1.0 + np.tanh(0.5 * z))  # overflow-free logistic
    return np.tanh(z)


def _act_grad(a, kind):
    return a * (1.0 - a) if kind == "sigmoid" else 1.0 - a * a


def softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward_all(net, x):
    acts = [x]
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = acts[-1] @ w + b
        acts.append(softmax(z) if i == last else _act(z, net.activation))
    return acts


def mlp_forward(net: MlpNetwork, features) -> np.ndarray:
    """Class probabilities for one sample (1-D) or a batch (2-D)."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape[-1] != net.n_features:
        raise ValueError(f"expected {net.n_features} features, got {x.shape[-1]}")
    return _forward_all(net, x)[-1]


def cross_entropy(probs, labels) -> float:
    p = probs[np.arange(len(labels)), labels]
    return float(-np.mean(np.log(np.maximum(p, 1e-300))))


def loss_and_grad(net: MlpNetwork, x, labels):
    """Mean cross-entropy and its gradient, ordered like ``net.params()``."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    acts = _forward_all(net, x)
    probs = acts[-1]
    n = x.shape[0]
    delta = probs.copy()
    delta[np.arange(n), labels] -= 1.0
    delta /= n
    gw = [None] * len(net.weights)
    gb = [None] * len(net.weights)
    for i in range(len(net.weights) - 1, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ net.weights[i].T) * _act_grad(acts[i], net.activation)
    return cross_entropy(probs, labels), [*gw, *gb]


def _with_params(net, params):
    k = len(net.weights)
    return MlpNetwork(params[:k], params[k:], net.activation)


def evaluate(net: MlpNetwork, x, labels) -> tuple[float, float]:
    labels = np.asarray(labels, dtype=np.int64)
    probs = mlp_forward(net, x)
    return cross_entropy(probs, labels), float(np.mean(probs.argmax(axis=1) == labels))


class _Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.b1 ** self.t
        c2 = 1.0 - self.b2 ** self.t
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = self.b1 * self.m[i] + (1.0 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1.0 - self.b2) * g * g
            out.append(p - self.lr * (self.m[i] / c1) / (np.sqrt(self.v[i] / c2) + self.eps))
        return out


def mlp_train(net: MlpNetwork, x, labels, lr: float, epochs: int, optimizer: str = "gd",
              test=None, on_epoch=None):
    """Full-batch training on mean cross-entropy; returns ``(net, records)``.

    Metrics are recorded after each update, on train and optionally on
    ``test=(features, labels)``.
    """
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    if not (lr >= 0.0 and math.isfinite(lr)):
        raise ValueError("learning rate must be a finite non-negative number")
    if optimizer not in OPTIMIZERS:
        raise ValueError(f"optimizer must be one of {OPTIMIZERS}")
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] != labels.shape[0]:
        raise ValueError("features must be 2-D and aligned with labels")
    if x.shape[1] != net.n_features:
        raise ValueError(f"expected {net.n_features} features, got {x.shape[1]}")
    adam = _Adam(net.params(), lr) if optimizer == "adam" else None
    records = []
    for epoch in range(1, epochs + 1):
        _, grads = loss_and_grad(net, x, labels)
        params = net.params()
        if adam is not None:
            params = adam.step(params, grads)
        else:
            params = [p - lr * g for p, g in zip(params, grads)]
        net = _with_params(net, params)
        rows = [MetricsRecord(epoch, "train", *evaluate(net, x, labels))]
        if test is not None:
            rows.append(MetricsRecord(epoch, "test", *evaluate(net, *test)))
        records.extend(rows)
        if on_epoch is not None:
            on_epoch(rows)
    return net, records


def mlp_gradient_check(net: MlpNetwork, sample, label, step: float = 1e-6) -> float:
    """Backprop versus central differences on one labelled sample.

    Returns the relative error defined by :func:`qnnsim.gradcheck.relative_error`.
    """
    x = np.atleast_2d(np.asarray(sample, dtype=np.float64))
    y = np.atleast_1d(np.asarray(label, dtype=np.int64))
    _, analytic = loss_and_grad(net, x, y)
    numeric = central_difference(
        lambda params: loss_and_grad(_with_params(net, params), x, y)[0], net.params(), step)
    return relative_error(analytic, numeric)
