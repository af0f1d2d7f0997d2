"""Product-of-sines quantum neural network.

A neuron with input angles ``phi`` and rotation weights ``theta`` outputs the
|1>-amplitude ``h = prod_n sin(phi_n + theta_n)`` of its target qubit. The
next layer reads each hidden value back as the angle ``arcsin(h)``. Outputs
are thresholded at ``y**2 >= 0.5`` into a big-endian binary class code.

The per-sample functions here (``forward``, ``backward``) are the readable
reference path. ``train`` and the batch helpers go through
:mod:`qnnsim.kernels`, which computes the same quantities over a whole batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import code_length, code_table, label_to_code
from .metrics import MetricsRecord

CLAMP_EPS = 1e-7
INIT_SCHEMES = ("halfpi", "uniform")


@dataclass
class QnnNetwork:
    """Rotation-angle matrices, one per layer, each shaped (neurons, inputs)."""

    layers: list
    n_classes: int

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a network needs at least one layer")
        self.layers = [np.array(w, dtype=np.float64) for w in self.layers]
        for w in self.layers:
            if w.ndim != 2 or 0 in w.shape:
                raise ValueError("each layer must be a non-empty 2-D matrix")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if nxt.shape[1] != prev.shape[0]:
                raise ValueError(
                    f"layer with {nxt.shape[1]} inputs follows a layer of {prev.shape[0]} neurons")
        if self.layers[-1].shape[0] != code_length(self.n_classes):
            raise ValueError(
                f"{self.n_classes} classes need {code_length(self.n_classes)} output qubits, "
                f"final layer has {self.layers[-1].shape[0]}")

    @classmethod
    def initialize(cls, n_features, hidden, n_classes, seed=0, scheme="halfpi", spread=0.5):
        """Seeded random network of shape n_features -> *hidden -> output qubits.

        ``halfpi`` draws each angle from N(pi/2, spread**2), so every sine
        factor starts close to 1. ``uniform`` draws from U[0, 2*pi).
        """
        rng = np.random.default_rng(seed)
        sizes = [n_features, *hidden, code_length(n_classes)]
        layers = []
        for n_in, n_out in zip(sizes, sizes[1:]):
            if scheme == "halfpi":
                layers.append(math.pi / 2 + spread * rng.standard_normal((n_out, n_in)))
            elif scheme == "uniform":
                layers.append(rng.uniform(0.0, 2 * math.pi, (n_out, n_in)))
            else:
                raise ValueError(f"unknown init scheme {scheme!r}; choose from {INIT_SCHEMES}")
        return cls(layers, n_classes)

    @property
    def output_qubits(self) -> int:
        return self.layers[-1].shape[0]

    @property
    def n_features(self) -> int:
        return self.layers[0].shape[1]

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_features, *(w.shape[0] for w in self.layers))

    def copy(self) -> "QnnNetwork":
        return QnnNetwork([w.copy() for w in self.layers], self.n_classes)


@dataclass
class ForwardTrace:
    """Per-layer input angles and raw outputs from one forward pass."""

    inputs: list
    outputs: list

    @property
    def y(self) -> np.ndarray:
        return self.outputs[-1]


def neuron_forward(phi, theta) -> float:
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if phi.shape != theta.shape or phi.ndim != 1 or phi.size == 0:
        raise ValueError("phi and theta must be non-empty vectors of equal length")
    return float(np.prod(np.sin(phi + theta)))


def angle_of(h):
    """Principal angle whose sine is ``h``, after clamping to [-1+eps, 1-eps]."""
    return np.arcsin(np.clip(h, -1.0 + CLAMP_EPS, 1.0 - CLAMP_EPS))


def forward(net: QnnNetwork, sample) -> ForwardTrace:
    phi = np.asarray(sample, dtype=np.float64)
    if phi.shape != (net.n_features,):
        raise ValueError(f"sample has {phi.size} angles, network expects {net.n_features}")
    inputs, outputs = [], []
    for i, w in enumerate(net.layers):
        h = np.sin(phi[None, :] + w).prod(axis=1)
        inputs.append(phi)
        outputs.append(h)
        if i + 1 < len(net.layers):
            phi = angle_of(h)
    return ForwardTrace(inputs, outputs)


def loss(outputs, target) -> float:
    y = np.asarray(outputs, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if y.shape != t.shape:
        raise ValueError("outputs and target code differ in length")
    return float(np.sum((y * y - t) ** 2))


def _others_product(s):
    # prod over k != n of s[..., k]; no division, so zero factors are safe
    n = s.shape[-1]
    out = np.empty_like(s)
    for k in range(n):
        out[..., k] = np.prod(np.delete(s, k, axis=-1), axis=-1)
    return out


def backward(net: QnnNetwork, trace: ForwardTrace, target) -> list:
    """Exact gradient of ``loss(trace.y, target)`` with respect to every weight."""
    t = np.asarray(target, dtype=np.float64)
    y = trace.y
    g_h = 4.0 * y * (y * y - t)
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        a = trace.inputs[i][None, :] + net.layers[i]
        d = g_h[:, None] * np.cos(a) * _others_product(np.sin(a))
        grads[i] = d
        if i > 0:
            hc = np.clip(trace.outputs[i - 1], -1.0 + CLAMP_EPS, 1.0 - CLAMP_EPS)
            g_h = d.sum(axis=0) / np.sqrt(1.0 - hc * hc)
    return grads


def gd_step(net: QnnNetwork, grads, lr: float) -> QnnNetwork:
    if not (lr >= 0.0 and math.isfinite(lr)):
        raise ValueError("learning rate must be a finite non-negative number")
    if len(grads) != len(net.layers) or any(g.shape != w.shape for g, w in zip(grads, net.layers)):
        raise ValueError("gradient shapes do not match the network")
    return QnnNetwork([w - lr * g for w, g in zip(net.layers, grads)], net.n_classes)


def predict_bits(outputs) -> np.ndarray:
    y = np.asarray(outputs, dtype=np.float64)
    return (y * y >= 0.5).astype(np.int64)


def decode_classes(outputs, c: int) -> np.ndarray:
    """Row-wise class decode of an (n_samples, output_qubits) output matrix.

    A thresholded bit pattern that is a valid code decodes to its class.
    Otherwise the class whose code is nearest to ``y**2`` in squared
    distance wins, ties going to the lowest index.
    """
    y = np.atleast_2d(np.asarray(outputs, dtype=np.float64))
    codes = code_table(c)
    if y.shape[1] != codes.shape[1]:
        raise ValueError(f"{c} classes need {codes.shape[1]} outputs, got {y.shape[1]}")
    p = y * y
    bits = (p >= 0.5).astype(np.int64)
    weights = 1 << np.arange(codes.shape[1] - 1, -1, -1)
    direct = bits @ weights
    dist = ((p[:, None, :] - codes[None, :, :]) ** 2).sum(axis=-1)
    return np.where(direct < c, direct, dist.argmin(axis=1))


def decode_class(outputs, c: int) -> int:
    return int(decode_classes(np.asarray(outputs)[None, :], c)[0])


def batch_outputs(net: QnnNetwork, angles) -> np.ndarray:
    a = np.ascontiguousarray(angles, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != net.n_features:
        raise ValueError(f"angle matrix must have {net.n_features} columns")
    return kernels.batch_forward(net.layers, a, CLAMP_EPS)


def targets_for(labels, c: int) -> np.ndarray:
    return np.ascontiguousarray(code_table(c)[np.asarray(labels, dtype=np.int64)])


def evaluate(net: QnnNetwork, angles, labels) -> tuple[float, float]:
    """Mean per-sample loss and decode accuracy."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(angles):
        raise ValueError("angles and labels differ in length")
    y = batch_outputs(net, angles)
    t = targets_for(labels, net.n_classes)
    mean_loss = float(np.sum((y * y - t) ** 2) / len(labels))
    acc = float(np.mean(decode_classes(y, net.n_classes) == labels))
    return mean_loss, acc


def loss_and_grad(net: QnnNetwork, angles, labels):
    """Mean loss over the batch and its gradient (one array per layer)."""
    a = np.ascontiguousarray(angles, dtype=np.float64)
    t = targets_for(labels, net.n_classes)
    total, grads = kernels.batch_loss_grad(net.layers, a, t, CLAMP_EPS)
    n = a.shape[0]
    return total / n, [g / n for g in grads]


def train(net: QnnNetwork, angles, labels, lr: float, epochs: int, test=None, on_epoch=None):
    """Full-batch gradient descent.

    Each epoch applies one step along the mean gradient over all training
    rows and then records train (and, if ``test=(angles, labels)`` is
    given, test) loss and accuracy for the updated weights.
    Returns ``(trained_net, records)``.
    """
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    angles = np.ascontiguousarray(angles, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if angles.shape[0] != labels.shape[0]:
        raise ValueError("angles and labels differ in length")
    if test is not None:
        test = (np.ascontiguousarray(test[0], dtype=np.float64), np.asarray(test[1], dtype=np.int64))
    records = []
    for epoch in range(1, epochs + 1):
        _, grads = loss_and_grad(net, angles, labels)
        net = gd_step(net, grads, lr)
        rows = [MetricsRecord(epoch, "train", *evaluate(net, angles, labels))]
        if test is not None:
            rows.append(MetricsRecord(epoch, "test", *evaluate(net, *test)))
        records.extend(rows)
        if on_epoch is not None:
            on_epoch(rows)
    return net, records


__all__ = [
    "CLAMP_EPS", "QnnNetwork", "ForwardTrace", "neuron_forward", "angle_of", "forward",
    "loss", "backward", "gd_step", "predict_bits", "decode_class", "decode_classes",
    "batch_outputs", "evaluate", "loss_and_grad", "train", "label_to_code",
]
