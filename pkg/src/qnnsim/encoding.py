"""Min-max angle encoding of raw feature vectors.

Each feature is mapped linearly onto ``[0, angle_range]`` using per-feature
extrema, and the angle ``t`` stands for the qubit ``cos(t)|0> + sin(t)|1>``.
The default range is a full turn (``2*pi``). Note that with a full turn
the minimum and maximum of a feature land on the same qubit state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature minima and maxima used to scale raw features."""

    per_feature_min: np.ndarray
    per_feature_max: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.per_feature_min, dtype=np.float64)
        hi = np.asarray(self.per_feature_max, dtype=np.float64)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError("min and max must be 1-D vectors of equal length")
        if np.any(lo > hi):
            raise ValueError("per_feature_min exceeds per_feature_max")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "per_feature_min", lo)
        object.__setattr__(self, "per_feature_max", hi)

    @property
    def n_features(self) -> int:
        return self.per_feature_min.shape[0]


class QubitAmplitudes(NamedTuple):
    a0: float
    a1: float


def compute_stats(dataset) -> FeatureStats:
    """Column-wise extrema over every row of ``dataset``."""
    if isinstance(dataset, np.ndarray):
        data = dataset
    else:
        rows = list(dataset)
        if rows and len({len(r) for r in rows}) > 1:
            raise ValueError("dataset rows have unequal lengths")
        data = np.asarray(rows, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("dataset must be a 2-D matrix")
    if data.shape[0] == 0 or data.shape[1] == 0:
        raise ValueError("dataset is empty")
    data = data.astype(np.float64, copy=False)
    return FeatureStats(data.min(axis=0), data.max(axis=0))


def encode_feature(x: float, lo: float, hi: float, angle_range: float = TWO_PI) -> float:
    if lo > hi:
        raise ValueError("min must not exceed max")
    if hi == lo:
        return 0.0
    u = (min(max(x, lo), hi) - lo) / (hi - lo)
    return u * angle_range


def unit_scale(raw, stats: FeatureStats) -> np.ndarray:
    """Map raw features (1-D or 2-D) onto [0, 1], clamping out-of-range values.

    Constant features map to 0.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape[-1] != stats.n_features:
        raise ValueError(
            f"expected {stats.n_features} features, got {raw.shape[-1]}")
    lo, hi = stats.per_feature_min, stats.per_feature_max
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    u = (np.clip(raw, lo, hi) - lo) / safe
    return np.where(span > 0, u, 0.0)


def encode_sample(raw, stats: FeatureStats, angle_range: float = TWO_PI) -> np.ndarray:
    """Encode one raw sample (or a matrix of samples, row-wise) into angles."""
    return unit_scale(raw, stats) * angle_range


def amplitudes(theta: float) -> QubitAmplitudes:
    return QubitAmplitudes(math.cos(theta), math.sin(theta))
